/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "core/data/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <json.hpp>

#include "core/common.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace dvslr {

const GlossEntry& GlossVocabulary::at(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= entries.size())
        throw_usage("gloss id out of range: " + std::to_string(id));
    return entries[id];
}

const ViewStream& SampleRecord::view(const std::string& v) const {
    auto it = views.find(v);
    if (it == views.end())
        throw_data("record " + key() + " has no view '" + v + "'");
    return it->second;
}

std::string SampleRecord::key() const {
    if (views.empty())
        throw_internal("SampleRecord::key on a record with no views");
    return fs::path(views.begin()->second.frame_dir).parent_path().generic_string();
}

const std::vector<std::size_t>& Manifest::split(const std::string& name) const {
    auto it = splits.find(name);
    if (it == splits.end())
        throw_data("manifest has no split '" + name + "'");
    return it->second;
}

std::optional<std::size_t> Manifest::find_record(const std::string& key) const {
    for (std::size_t i = 0; i < records.size(); ++i)
        if (records[i].key() == key)
            return i;
    return std::nullopt;
}

namespace {

std::vector<std::string> read_lines(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw_io("cannot open file: " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

std::vector<std::string> sorted_subdirs(const fs::path& dir) {
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_directory())
            names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    return names;
}

/// Count sequentially numbered frame files 00001.jpg..N; a gap is an
/// integrity error.
std::size_t count_frames(const fs::path& view_dir) {
    static const std::regex frame_re(R"(^(\d{5})\.jpg$)");
    std::vector<std::size_t> nums;
    for (const auto& e : fs::directory_iterator(view_dir)) {
        if (!e.is_regular_file())
            continue;
        std::smatch m;
        const std::string name = e.path().filename().string();
        if (std::regex_match(name, m, frame_re))
            nums.push_back(std::stoul(m[1]));
    }
    if (nums.empty())
        throw_data("no frame files in " + view_dir.string());
    std::sort(nums.begin(), nums.end());
    for (std::size_t i = 0; i < nums.size(); ++i) {
        if (nums[i] != i + 1)
            throw_data("gap in frame numbering in " + view_dir.string() + ": expected " +
                       std::to_string(i + 1) + ", found " + std::to_string(nums[i]));
    }
    return nums.size();
}

} // namespace

Manifest build_manifest(const fs::path& root_dir, const fs::path& mapping_file,
                        const std::map<std::string, fs::path>& partition_files) {
    if (!fs::exists(root_dir) || !fs::is_directory(root_dir))
        throw_io("dataset root is not a directory: " + root_dir.string());

    Manifest m;
    m.root = root_dir;

    std::map<std::string, int> dir_to_gloss;
    int next_id = 0;
    for (const std::string& line : read_lines(mapping_file)) {
        if (line.empty())
            continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw_data("mapping file " + mapping_file.string() +
                       ": expected '<gloss_dir>\\t<label>', got: " + line);
        GlossEntry e;
        e.id = next_id++;
        e.dir = line.substr(0, tab);
        e.label = line.substr(tab + 1);
        if (e.dir.empty() || e.label.empty())
            throw_data("mapping file " + mapping_file.string() + ": empty field in line: " + line);
        if (!dir_to_gloss.emplace(e.dir, e.id).second)
            throw_data("mapping file: duplicate gloss directory '" + e.dir + "'");
        m.vocabulary.entries.push_back(std::move(e));
    }
    if (m.vocabulary.entries.empty())
        throw_data("mapping file " + mapping_file.string() + " defines no glosses");

    for (const std::string& gloss_dir : sorted_subdirs(root_dir)) {
        auto it = dir_to_gloss.find(gloss_dir);
        if (it == dir_to_gloss.end())
            throw_data("directory '" + gloss_dir + "' under " + root_dir.string() +
                       " is not in the mapping file");
        for (const std::string& signer_dir : sorted_subdirs(root_dir / gloss_dir)) {
            SampleRecord rec;
            rec.gloss_id = it->second;
            try {
                rec.signer_id = std::stoi(signer_dir);
            } catch (const std::exception&) {
                throw_data("signer directory name is not numeric: " + gloss_dir + "/" + signer_dir);
            }
            for (const std::string& view : view_names()) {
                const fs::path view_dir = root_dir / gloss_dir / signer_dir / view;
                if (!fs::exists(view_dir) || !fs::is_directory(view_dir))
                    throw_data("sample " + gloss_dir + "/" + signer_dir + " is missing view '" +
                               view + "'");
                ViewStream vs;
                vs.frame_dir = (fs::path(gloss_dir) / signer_dir / view).generic_string();
                vs.num_raw_frames = count_frames(view_dir);
                rec.views[view] = std::move(vs);
            }
            m.records.push_back(std::move(rec));
        }
    }
    if (m.records.empty())
        throw_data("no sample directories found under " + root_dir.string());

    std::stable_sort(m.records.begin(), m.records.end(), [](const auto& a, const auto& b) {
        return std::tie(a.gloss_id, a.signer_id) < std::tie(b.gloss_id, b.signer_id);
    });

    std::map<std::string, std::size_t> key_to_index;
    for (std::size_t i = 0; i < m.records.size(); ++i)
        key_to_index[m.records[i].key()] = i;

    for (const auto& [split_name, path] : partition_files) {
        std::vector<std::size_t> indices;
        std::set<std::size_t> seen;
        for (const std::string& line : read_lines(path)) {
            if (line.empty() || line[0] == '#')
                continue;
            auto it = key_to_index.find(line);
            if (it == key_to_index.end())
                throw_data("partition file " + path.string() + ": unknown record key '" + line + "'");
            if (!seen.insert(it->second).second)
                throw_data("partition file " + path.string() + ": duplicate record key '" + line + "'");
            indices.push_back(it->second);
        }
        m.splits[split_name] = std::move(indices);
    }
    return m;
}

ValidationReport validate_manifest(const Manifest& m) {
    ValidationReport rep;
    rep.num_records = m.records.size();
    rep.vocab_size = m.vocabulary.size();

    auto violate = [&rep](const std::string& code, const std::string& msg) {
        rep.violations.push_back({code, msg});
    };

    std::set<std::string> labels, dirs;
    for (std::size_t i = 0; i < m.vocabulary.entries.size(); ++i) {
        const GlossEntry& e = m.vocabulary.entries[i];
        if (e.id != static_cast<int>(i))
            violate("vocab_noncontiguous", "gloss at position " + std::to_string(i) + " has id " +
                                               std::to_string(e.id));
        if (!labels.insert(e.label).second)
            violate("vocab_duplicate_label", "duplicate gloss label '" + e.label + "'");
        if (!dirs.insert(e.dir).second)
            violate("vocab_duplicate_dir", "duplicate gloss directory '" + e.dir + "'");
    }

    std::set<int> signers;
    for (std::size_t i = 0; i < m.records.size(); ++i) {
        const SampleRecord& r = m.records[i];
        signers.insert(r.signer_id);
        const std::string name =
            r.views.empty() ? ("record #" + std::to_string(i)) : ("record " + r.key());
        if (r.gloss_id < 0 || static_cast<std::size_t>(r.gloss_id) >= m.vocabulary.size())
            violate("record_bad_gloss", name + " has gloss_id outside the vocabulary: " +
                                            std::to_string(r.gloss_id));
        for (const std::string& view : view_names()) {
            if (!r.has_view(view)) {
                violate("record_missing_view", name + " is missing view '" + view + "'");
                continue;
            }
            rep.actual_view_streams += 1;
            if (r.views.at(view).num_raw_frames < 1)
                violate("record_empty_view", name + " view '" + view + "' has no frames");
        }
    }
    rep.num_signers = signers.size();
    rep.expected_view_streams = rep.vocab_size * rep.num_signers * view_names().size();

    std::map<std::size_t, std::string> index_owner;
    for (const auto& [split_name, indices] : m.splits) {
        for (std::size_t idx : indices) {
            if (idx >= m.records.size()) {
                violate("split_bad_index", "split '" + split_name + "' references record #" +
                                               std::to_string(idx) + " out of range");
                continue;
            }
            auto [it, inserted] = index_owner.emplace(idx, split_name);
            if (!inserted)
                violate("split_overlap", "record #" + std::to_string(idx) + " appears in splits '" +
                                             it->second + "' and '" + split_name + "'");
        }
    }
    return rep;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    os << "records=" << num_records << " vocabulary=" << vocab_size << " signers=" << num_signers
       << " view_streams=" << actual_view_streams << "/" << expected_view_streams << " violations="
       << violations.size();
    return os.str();
}

std::string ValidationReport::to_json() const {
    json j;
    j["num_records"] = num_records;
    j["vocab_size"] = vocab_size;
    j["num_signers"] = num_signers;
    j["expected_view_streams"] = expected_view_streams;
    j["actual_view_streams"] = actual_view_streams;
    j["violations"] = json::array();
    for (const auto& v : violations)
        j["violations"].push_back({{"code", v.code}, {"message", v.message}});
    return j.dump();
}

namespace {

std::uint64_t bounded_draw(Rng& rng, std::uint64_t m) {
    // Rejection sampling keeps the draw exactly uniform.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % m;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % m;
}

} // namespace

SubsetSpec build_subset_of(std::size_t vocab_size, std::size_t k, std::uint64_t seed, bool nested) {
    if (k < 1 || k > vocab_size)
        throw_usage("build_subset: K must be in [1, " + std::to_string(vocab_size) + "], got " +
                    std::to_string(k));
    // Independent draws fold K into the stream; the nested variant shares one
    // stream so the first K picks of a larger K are a superset of a smaller K.
    Rng rng = nested ? make_rng(derive_seed(seed, "subset-nested"))
                     : make_rng(derive_seed(seed, "subset", k));
    std::vector<int> ids(vocab_size);
    for (std::size_t i = 0; i < vocab_size; ++i)
        ids[i] = static_cast<int>(i);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + bounded_draw(rng, vocab_size - i);
        std::swap(ids[i], ids[j]);
    }
    SubsetSpec spec;
    spec.k = k;
    spec.seed = seed;
    spec.nested = nested;
    spec.selected_gloss_ids.assign(ids.begin(), ids.begin() + k);
    std::sort(spec.selected_gloss_ids.begin(), spec.selected_gloss_ids.end());
    return spec;
}

SubsetSpec build_subset(const Manifest& manifest, std::size_t k, std::uint64_t seed, bool nested) {
    return build_subset_of(manifest.vocabulary.size(), k, seed, nested);
}

Manifest apply_subset(const Manifest& m, const SubsetSpec& spec) {
    if (spec.selected_gloss_ids.size() != spec.k)
        throw_usage("apply_subset: spec size mismatch");
    std::map<int, int> remap;
    for (int old_id : spec.selected_gloss_ids) {
        if (old_id < 0 || static_cast<std::size_t>(old_id) >= m.vocabulary.size())
            throw_usage("apply_subset: gloss id " + std::to_string(old_id) +
                        " outside the vocabulary");
        if (!remap.emplace(old_id, 0).second)
            throw_usage("apply_subset: duplicate gloss id " + std::to_string(old_id));
    }
    int next = 0;
    for (auto& [old_id, new_id] : remap)
        new_id = next++;

    Manifest out;
    out.root = m.root;
    for (const auto& [old_id, new_id] : remap) {
        GlossEntry e = m.vocabulary.at(old_id);
        e.id = new_id;
        out.vocabulary.entries.push_back(std::move(e));
    }

    std::vector<std::ptrdiff_t> record_remap(m.records.size(), -1);
    for (std::size_t i = 0; i < m.records.size(); ++i) {
        auto it = remap.find(m.records[i].gloss_id);
        if (it == remap.end())
            continue;
        SampleRecord r = m.records[i];
        r.gloss_id = it->second;
        record_remap[i] = static_cast<std::ptrdiff_t>(out.records.size());
        out.records.push_back(std::move(r));
    }
    for (const auto& [split_name, indices] : m.splits) {
        std::vector<std::size_t> kept;
        for (std::size_t idx : indices)
            if (idx < record_remap.size() && record_remap[idx] >= 0)
                kept.push_back(static_cast<std::size_t>(record_remap[idx]));
        out.splits[split_name] = std::move(kept);
    }
    return out;
}

void save_manifest(const Manifest& m, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw_io("cannot write manifest file: " + path.string());

    json header;
    header["type"] = "dvslr-manifest";
    header["version"] = 1;
    header["root"] = m.root.generic_string();
    header["vocabulary"] = json::array();
    for (const auto& e : m.vocabulary.entries)
        header["vocabulary"].push_back({{"id", e.id}, {"label", e.label}, {"dir", e.dir}});
    header["splits"] = json::object();
    for (const auto& [name, indices] : m.splits)
        header["splits"][name] = indices;
    out << header.dump() << "\n";

    for (const auto& r : m.records) {
        json rec;
        rec["gloss_id"] = r.gloss_id;
        rec["label"] = m.vocabulary.at(r.gloss_id).label;
        rec["signer_id"] = r.signer_id;
        rec["views"] = json::object();
        for (const auto& [view, vs] : r.views)
            rec["views"][view] = {{"dir", vs.frame_dir}, {"frames", vs.num_raw_frames}};
        out << rec.dump() << "\n";
    }
    if (!out)
        throw_io("failed writing manifest file: " + path.string());
}

Manifest load_manifest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw_io("cannot open manifest file: " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw_data("manifest file is empty: " + path.string());

    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception& e) {
        throw_data("manifest header is not valid JSON: " + std::string(e.what()));
    }
    if (header.value("type", "") != "dvslr-manifest")
        throw_data("not a manifest file: " + path.string());
    if (header.value("version", 0) != 1)
        throw_data("unsupported manifest version in " + path.string());

    Manifest m;
    fs::path root = fs::path(header.value("root", std::string()));
    m.root = root.is_absolute() ? root : path.parent_path() / root;
    for (const auto& e : header.at("vocabulary")) {
        GlossEntry g;
        g.id = e.at("id").get<int>();
        g.label = e.at("label").get<std::string>();
        g.dir = e.value("dir", "");
        m.vocabulary.entries.push_back(std::move(g));
    }
    if (header.contains("splits"))
        for (const auto& [name, indices] : header.at("splits").items())
            m.splits[name] = indices.get<std::vector<std::size_t>>();

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw_data("manifest line " + std::to_string(line_no) + " is not valid JSON: " +
                       std::string(e.what()));
        }
        SampleRecord r;
        r.gloss_id = rec.at("gloss_id").get<int>();
        r.signer_id = rec.at("signer_id").get<int>();
        for (const auto& [view, vs] : rec.at("views").items()) {
            ViewStream s;
            s.frame_dir = vs.at("dir").get<std::string>();
            s.num_raw_frames = vs.at("frames").get<std::size_t>();
            r.views[view] = std::move(s);
        }
        if (rec.contains("label")) {
            const std::string label = rec.at("label").get<std::string>();
            if (r.gloss_id >= 0 && static_cast<std::size_t>(r.gloss_id) < m.vocabulary.size() &&
                m.vocabulary.at(r.gloss_id).label != label)
                throw_data("manifest line " + std::to_string(line_no) +
                           ": label does not match the vocabulary entry");
        }
        m.records.push_back(std::move(r));
    }
    return m;
}

void save_subset(const SubsetSpec& spec, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw_io("cannot write subset file: " + path.string());
    for (int id : spec.selected_gloss_ids)
        out << id << "\n";
}

SubsetSpec load_subset(const fs::path& path) {
    SubsetSpec spec;
    for (const std::string& line : read_lines(path)) {
        if (line.empty() || line[0] == '#')
            continue;
        try {
            spec.selected_gloss_ids.push_back(std::stoi(line));
        } catch (const std::exception&) {
            throw_data("subset file " + path.string() + ": not a gloss id: " + line);
        }
    }
    std::sort(spec.selected_gloss_ids.begin(), spec.selected_gloss_ids.end());
    spec.k = spec.selected_gloss_ids.size();
    return spec;
}

} // namespace dvslr
