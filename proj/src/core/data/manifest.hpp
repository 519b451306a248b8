/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dvslr {

inline const std::vector<std::string>& view_names() {
    static const std::vector<std::string> v{"front", "left"};
    return v;
}

/// Ordered gloss vocabulary. Labels carry disambiguation suffixes such as
/// "1-2" / "2-1" and may contain non-ASCII text; ids are contiguous 0..V-1.
struct GlossEntry {
    int id = 0;
    std::string label;
    std::string dir; // on-disk directory name for this gloss
};

struct GlossVocabulary {
    std::vector<GlossEntry> entries;

    std::size_t size() const { return entries.size(); }
    const GlossEntry& at(int id) const;
};

struct ViewStream {
    std::string frame_dir; // relative to the manifest root
    std::size_t num_raw_frames = 0;
};

/// One dual-view sample: a gloss signed by one signer, captured as two
/// synchronized frame directories.
struct SampleRecord {
    int gloss_id = 0;
    int signer_id = 0;
    std::map<std::string, ViewStream> views;

    bool has_view(const std::string& v) const { return views.count(v) != 0; }
    const ViewStream& view(const std::string& v) const;

    /// Stable key used in partition and score files: "<gloss_dir>/<signer_dir>".
    std::string key() const;
};

struct Manifest {
    std::filesystem::path root; // base directory for relative frame_dirs
    GlossVocabulary vocabulary;
    std::vector<SampleRecord> records;
    std::map<std::string, std::vector<std::size_t>> splits;

    const std::vector<std::size_t>& split(const std::string& name) const;
    std::optional<std::size_t> find_record(const std::string& key) const;
};

struct Violation {
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::size_t num_records = 0;
    std::size_t vocab_size = 0;
    std::size_t num_signers = 0;
    std::size_t expected_view_streams = 0; // |vocabulary| * |signers| * 2
    std::size_t actual_view_streams = 0;

    bool ok() const { return violations.empty(); }
    std::string to_json() const;
    std::string summary() const;
};

/// Deterministic K-gloss subset of a vocabulary.
struct SubsetSpec {
    std::size_t k = 0;
    std::vector<int> selected_gloss_ids; // ascending, distinct
    std::uint64_t seed = 0;
    bool nested = false;
};

/// Scan a frame tree laid out as <root>/<gloss_dir>/<signer>/<view>/00001.jpg
/// and assemble a Manifest. The mapping file relates gloss directories to
/// labels (one "<gloss_dir>\t<label>" line per gloss, line order = gloss id);
/// partition files list record keys, one per line.
Manifest build_manifest(const std::filesystem::path& root_dir,
                        const std::filesystem::path& mapping_file,
                        const std::map<std::string, std::filesystem::path>& partition_files);

ValidationReport validate_manifest(const Manifest& manifest);

/// Deterministically pick K distinct gloss ids. Independent draw per K by
/// default; `nested` makes subsets for the same seed prefix-compatible.
SubsetSpec build_subset(const Manifest& manifest, std::size_t k, std::uint64_t seed,
                        bool nested = false);
SubsetSpec build_subset_of(std::size_t vocab_size, std::size_t k, std::uint64_t seed,
                           bool nested = false);

/// Restrict a manifest to the subset's glosses, re-indexing gloss ids to
/// 0..K-1 so the vocabulary invariant keeps holding.
Manifest apply_subset(const Manifest& manifest, const SubsetSpec& subset);

// Serialization: line-delimited UTF-8 text, one JSON record per line after a
// JSON header carrying vocabulary and splits.
void save_manifest(const Manifest& manifest, const std::filesystem::path& path);
Manifest load_manifest(const std::filesystem::path& path);

void save_subset(const SubsetSpec& spec, const std::filesystem::path& path);
SubsetSpec load_subset(const std::filesystem::path& path);

} // namespace dvslr
