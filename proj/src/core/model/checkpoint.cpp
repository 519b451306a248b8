/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "core/model/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "core/common.hpp"

using nlohmann::json;

namespace dvslr {

void save_checkpoint(const std::filesystem::path& path, const json& header,
                     const ParamStore& params) {
    json full = header;
    full["format"] = "dvslr-checkpoint";
    full["version"] = 1;
    full["params"] = json::array();
    for (const auto& e : params.entries())
        full["params"].push_back({{"name", e.name}, {"rows", e.rows}, {"cols", e.cols}});
    const std::string htext = full.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw_io("cannot write checkpoint file: " + path.string());
    out.write(kCheckpointMagic, 8);
    const std::uint64_t hlen = htext.size();
    out.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
    out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
    out.write(reinterpret_cast<const char*>(params.raw().data()),
              static_cast<std::streamsize>(params.raw().size() * sizeof(double)));
    if (!out)
        throw_io("failed writing checkpoint file: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw_io("cannot open checkpoint file: " + path.string());
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kCheckpointMagic, 8) != 0)
        throw_data("not a checkpoint file: " + path.string());
    std::uint64_t hlen = 0;
    in.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
    if (!in || hlen == 0 || hlen > (1ULL << 30))
        throw_data("corrupt checkpoint header in " + path.string());
    std::string htext(hlen, '\0');
    in.read(htext.data(), static_cast<std::streamsize>(hlen));
    if (!in)
        throw_data("truncated checkpoint header in " + path.string());

    Checkpoint ck;
    try {
        ck.header = json::parse(htext);
    } catch (const json::exception& e) {
        throw_data("checkpoint header is not valid JSON: " + std::string(e.what()));
    }
    if (ck.header.value("format", "") != "dvslr-checkpoint")
        throw_data("unrecognized checkpoint format in " + path.string());
    if (ck.header.value("version", 0) != 1)
        throw_data("unsupported checkpoint version in " + path.string());

    for (const auto& p : ck.header.at("params"))
        ck.params.add(p.at("name").get<std::string>(), p.at("rows").get<int>(),
                      p.at("cols").get<int>());
    in.read(reinterpret_cast<char*>(ck.params.raw().data()),
            static_cast<std::streamsize>(ck.params.size() * sizeof(double)));
    if (!in || in.gcount() != static_cast<std::streamsize>(ck.params.size() * sizeof(double)))
        throw_data("truncated checkpoint weights in " + path.string());
    if (!all_finite(ck.params.raw()))
        throw_numeric("checkpoint contains non-finite weights: " + path.string());
    return ck;
}

void restore_params(ParamStore& dst, const Checkpoint& ck) {
    const auto& a = dst.entries();
    const auto& b = ck.params.entries();
    if (a.size() != b.size())
        throw_data("checkpoint parameter table does not match the model");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].name != b[i].name || a[i].rows != b[i].rows || a[i].cols != b[i].cols)
            throw_data("checkpoint parameter mismatch at '" + b[i].name + "'");
    dst.raw() = ck.params.raw();
}

} // namespace dvslr
