/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "core/synth/synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>

#include "core/data/clip.hpp"
#include "core/data/image.hpp"
#include "core/json_util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace dvslr {

namespace {

constexpr double kTwoPi = 6.283185307179586;

struct AxisParam {
    double freq = 1.0;  // cycles over the video
    double phase = 0.0; // cycles
    double amp = 0.3;   // fraction of the unit box
};

struct ClassTrajectory {
    AxisParam x, y, z;
};

double frac(double v) { return v - std::floor(v); }

double unit(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

/// Spread class parameters with low-discrepancy sequences so distinct classes
/// stay apart in every projection, then overwrite the shared axes of each
/// occlusion pair.
std::vector<ClassTrajectory> class_trajectories(const SynthConfig& cfg) {
    constexpr double golden = 0.618033988749895;
    constexpr double plastic = 0.754877666246693;

    std::vector<ClassTrajectory> out(cfg.num_classes);
    Rng rng = make_rng(derive_seed(cfg.seed, "class-params"));
    for (int c = 0; c < cfg.num_classes; ++c) {
        ClassTrajectory& t = out[c];
        t.x.freq = 1 + (c % 2);
        t.y.freq = 1 + ((c / 2) % 2);
        t.z.freq = 1 + ((c / 4) % 2);
        t.x.phase = frac(golden * (c + 1));
        t.y.phase = frac(2.0 * golden * (c + 1) + 0.37);
        t.z.phase = frac(3.0 * golden * (c + 1) + 0.71);
        t.x.amp = 0.24 + 0.08 * frac(plastic * (c + 1));
        t.y.amp = 0.24 + 0.08 * frac(plastic * plastic * (c + 1));
        t.z.amp = 0.24 + 0.08 * frac(plastic * plastic * plastic * (c + 1));
        for (AxisParam* a : {&t.x, &t.y, &t.z}) {
            a->phase = frac(a->phase + 0.02 * (unit(rng) - 0.5));
            a->amp *= 1.0 + 0.05 * (unit(rng) - 0.5);
        }
    }
    for (const auto& [a, b] : cfg.front_occlusion_pairs) {
        out[b].x = out[a].x;
        out[b].y = out[a].y;
        // Push the hidden axis clearly apart so the other view separates them.
        out[b].z.freq = 3.0 - out[a].z.freq;
        out[b].z.phase = frac(out[a].z.phase + 0.5);
        out[b].z.amp = out[a].z.amp;
    }
    for (const auto& [a, b] : cfg.left_occlusion_pairs) {
        out[b].z = out[a].z;
        out[b].y = out[a].y;
        out[b].x.freq = 3.0 - out[a].x.freq;
        out[b].x.phase = frac(out[a].x.phase + 0.5);
        out[b].x.amp = out[a].x.amp;
    }
    return out;
}

RawImage render_frame(int size, double cx, double cy, double radius, double noise, Rng& pixel_rng) {
    constexpr double bg = 0.05, fg = 0.95, edge = 1.5;
    RawImage img;
    img.h = size;
    img.w = size;
    img.c = 3;
    img.data.resize(static_cast<std::size_t>(size) * size * 3);
    for (int row = 0; row < size; ++row) {
        for (int col = 0; col < size; ++col) {
            const double d = std::hypot(col - cx, row - cy);
            const double cov = std::clamp((radius - d) / edge + 0.5, 0.0, 1.0);
            double v = bg + (fg - bg) * cov;
            if (noise > 0.0)
                v += noise * (2.0 * unit(pixel_rng) - 1.0);
            const auto byte = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
            for (int ch = 0; ch < 3; ++ch)
                img.data[(static_cast<std::size_t>(row) * size + col) * 3 + ch] = byte;
        }
    }
    return img;
}

std::string gloss_dir_name(int c) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d", c);
    return buf;
}

std::string signer_dir_name(int s) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%02d", s);
    return buf;
}

} // namespace

int SynthConfig::signers() const {
    int total = 0;
    for (const auto& [name, count] : samples_per_class_per_split)
        total += count;
    return total;
}

std::vector<std::string> SynthConfig::validate() const {
    if (num_classes < 1)
        throw_usage("synth config: num_classes must be >= 1");
    if (frames_per_video < 1)
        throw_usage("synth config: frames_per_video must be >= 1");
    if (image_size < 8)
        throw_usage("synth config: image_size must be >= 8");
    if (noise_level < 0.0)
        throw_usage("synth config: noise_level must be >= 0");
    for (const auto& [name, count] : samples_per_class_per_split) {
        if (name != "train" && name != "val" && name != "test")
            throw_usage("synth config: unknown split '" + name + "'");
        if (count < 0)
            throw_usage("synth config: negative sample count for split '" + name + "'");
    }
    if (signers() < 1)
        throw_usage("synth config: at least one sample per class is required");

    std::set<int> used;
    auto check_pairs = [&](const std::vector<std::pair<int, int>>& pairs, const char* which) {
        for (const auto& [a, b] : pairs) {
            if (a < 0 || b < 0 || a >= num_classes || b >= num_classes)
                throw_usage(std::string("synth config: ") + which + " pair member out of range");
            if (a == b)
                throw_usage(std::string("synth config: ") + which + " pair members must differ");
            if (!used.insert(a).second || !used.insert(b).second)
                throw_usage("synth config: a class may appear in at most one occlusion pair");
        }
    };
    check_pairs(front_occlusion_pairs, "front occlusion");
    check_pairs(left_occlusion_pairs, "left occlusion");

    std::vector<std::string> warnings;
    if (frames_per_video < clip_window_hint)
        warnings.push_back("frames_per_video (" + std::to_string(frames_per_video) +
                           ") is below the expected clip window (" +
                           std::to_string(clip_window_hint) +
                           "); clips will repeat trailing frames");
    return warnings;
}

SynthConfig SynthConfig::from_json(const json& j) {
    check_keys(j,
               {"num_classes", "samples_per_class_per_split", "frames_per_video", "image_size",
                "front_occlusion_pairs", "left_occlusion_pairs", "noise_level", "seed",
                "clip_window_hint"},
               "synth config");
    SynthConfig cfg;
    cfg.num_classes = j.value("num_classes", cfg.num_classes);
    if (j.contains("samples_per_class_per_split")) {
        cfg.samples_per_class_per_split.clear();
        for (const auto& [name, count] : j.at("samples_per_class_per_split").items())
            cfg.samples_per_class_per_split[name] = count.get<int>();
    }
    cfg.frames_per_video = j.value("frames_per_video", cfg.frames_per_video);
    cfg.image_size = j.value("image_size", cfg.image_size);
    if (j.contains("front_occlusion_pairs"))
        cfg.front_occlusion_pairs =
            j.at("front_occlusion_pairs").get<std::vector<std::pair<int, int>>>();
    if (j.contains("left_occlusion_pairs"))
        cfg.left_occlusion_pairs =
            j.at("left_occlusion_pairs").get<std::vector<std::pair<int, int>>>();
    cfg.noise_level = j.value("noise_level", cfg.noise_level);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.clip_window_hint = j.value("clip_window_hint", cfg.clip_window_hint);
    return cfg;
}

SynthConfig SynthConfig::from_json_text(const std::string& text) {
    return from_json(parse_json(text, "synth config"));
}

json SynthConfig::to_json() const {
    json j;
    j["num_classes"] = num_classes;
    j["samples_per_class_per_split"] = samples_per_class_per_split;
    j["frames_per_video"] = frames_per_video;
    j["image_size"] = image_size;
    j["front_occlusion_pairs"] = front_occlusion_pairs;
    j["left_occlusion_pairs"] = left_occlusion_pairs;
    j["noise_level"] = noise_level;
    j["seed"] = seed;
    j["clip_window_hint"] = clip_window_hint;
    return j;
}

Manifest generate_synthetic_dataset(const SynthConfig& cfg, const fs::path& out_dir) {
    for (const std::string& w : cfg.validate())
        std::cerr << "warning: " << w << "\n";

    const fs::path frames_root = out_dir / "frames";
    std::error_code ec;
    fs::create_directories(frames_root, ec);
    if (ec || !fs::is_directory(frames_root))
        throw_io("cannot create output directory: " + frames_root.string());

    const int num_signers = cfg.signers();
    const auto trajectories = class_trajectories(cfg);

    // Per-signer style: a common phase offset plus a disk-radius variation.
    // Both are shared across the two views and across paired classes, so an
    // occlusion pair stays pixel-identical in its hidden view at noise 0.
    std::vector<double> signer_offset(num_signers), signer_radius(num_signers);
    for (int s = 0; s < num_signers; ++s) {
        Rng rng = make_rng(derive_seed(cfg.seed, "signer", static_cast<std::uint64_t>(s)));
        signer_offset[s] = 0.03 * (unit(rng) - 0.5);
        signer_radius[s] = 0.085 * cfg.image_size * (1.0 + 0.2 * (unit(rng) - 0.5));
    }

    struct Job {
        int c, s;
    };
    std::vector<Job> jobs;
    jobs.reserve(static_cast<std::size_t>(cfg.num_classes) * num_signers);
    for (int c = 0; c < cfg.num_classes; ++c)
        for (int s = 0; s < num_signers; ++s) {
            for (const std::string& view : view_names())
                fs::create_directories(frames_root / gloss_dir_name(c) / signer_dir_name(s) / view);
            jobs.push_back({c, s});
        }

    const int num_jobs = static_cast<int>(jobs.size());
#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < num_jobs; ++j) {
        const auto [c, s] = jobs[j];
        const ClassTrajectory& traj = trajectories[c];
        const std::uint64_t sample_seed =
            derive_seed(derive_seed(cfg.seed, "sample"),
                        static_cast<std::uint64_t>(c) * 1000003ULL + static_cast<std::uint64_t>(s));

        // One physical trajectory per sample: phase jitter is drawn once and
        // shared by both views.
        double jitter[3] = {0.0, 0.0, 0.0};
        if (cfg.noise_level > 0.0) {
            Rng jrng = make_rng(derive_seed(sample_seed, "jitter"));
            for (double& v : jitter)
                v = 0.25 * cfg.noise_level * (2.0 * unit(jrng) - 1.0);
        }
        auto pos = [&](const AxisParam& a, double jit, int t) {
            const double u = cfg.frames_per_video > 1
                                 ? static_cast<double>(t) / (cfg.frames_per_video - 1)
                                 : 0.5;
            return 0.5 + a.amp * std::sin(kTwoPi * (a.freq * u + a.phase + signer_offset[s] + jit));
        };

        for (const std::string& view : view_names()) {
            Rng pixel_rng = make_rng(derive_seed(sample_seed, view));
            const fs::path dir = frames_root / gloss_dir_name(c) / signer_dir_name(s) / view;
            for (int t = 0; t < cfg.frames_per_video; ++t) {
                const double px = view == "front" ? pos(traj.x, jitter[0], t) : pos(traj.z, jitter[2], t);
                const double py = pos(traj.y, jitter[1], t);
                const double cx = px * (cfg.image_size - 1);
                const double cy = (1.0 - py) * (cfg.image_size - 1);
                RawImage frame = render_frame(cfg.image_size, cx, cy, signer_radius[s],
                                              cfg.noise_level, pixel_rng);
                write_jpeg(frame_file_path(dir, static_cast<std::size_t>(t) + 1), frame);
            }
        }
    }

    std::ofstream mapping(out_dir / "mapping.tsv", std::ios::binary);
    if (!mapping)
        throw_io("cannot write mapping file under " + out_dir.string());
    for (int c = 0; c < cfg.num_classes; ++c) {
        char label[32];
        std::snprintf(label, sizeof(label), "class_%04d", c);
        mapping << gloss_dir_name(c) << "\t" << label << "\n";
    }
    mapping.close();

    Manifest m;
    m.root = "frames";
    for (int c = 0; c < cfg.num_classes; ++c) {
        char label[32];
        std::snprintf(label, sizeof(label), "class_%04d", c);
        m.vocabulary.entries.push_back({c, label, gloss_dir_name(c)});
    }
    for (int c = 0; c < cfg.num_classes; ++c)
        for (int s = 0; s < num_signers; ++s) {
            SampleRecord rec;
            rec.gloss_id = c;
            rec.signer_id = s;
            for (const std::string& view : view_names()) {
                ViewStream vs;
                vs.frame_dir =
                    (fs::path(gloss_dir_name(c)) / signer_dir_name(s) / view).generic_string();
                vs.num_raw_frames = static_cast<std::size_t>(cfg.frames_per_video);
                rec.views[view] = std::move(vs);
            }
            m.records.push_back(std::move(rec));
        }

    // Signer-disjoint splits: consecutive signer blocks go to train/val/test.
    fs::create_directories(out_dir / "partitions");
    int signer_begin = 0;
    for (const char* split_name : {"train", "val", "test"}) {
        auto it = cfg.samples_per_class_per_split.find(split_name);
        if (it == cfg.samples_per_class_per_split.end())
            continue;
        const int signer_end = signer_begin + it->second;
        std::vector<std::size_t> indices;
        std::ofstream part(out_dir / "partitions" / (std::string(split_name) + ".txt"),
                           std::ios::binary);
        if (!part)
            throw_io("cannot write partition file under " + out_dir.string());
        for (std::size_t i = 0; i < m.records.size(); ++i) {
            if (m.records[i].signer_id >= signer_begin && m.records[i].signer_id < signer_end) {
                indices.push_back(i);
                part << m.records[i].key() << "\n";
            }
        }
        m.splits[split_name] = std::move(indices);
        signer_begin = signer_end;
    }

    save_manifest(m, out_dir / "manifest.jsonl");
    m.root = frames_root;
    return m;
}

} // namespace dvslr
