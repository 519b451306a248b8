/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <filesystem>

#include <json.hpp>

#include "core/tensor.hpp"

namespace dvslr {

/// Self-describing weight archive: a JSON header (configs, vocabulary size,
/// parameter table) followed by raw little-endian doubles.
struct Checkpoint {
    nlohmann::json header;
    ParamStore params;
};

inline constexpr char kCheckpointMagic[9] = "DVSLRCK1";

void save_checkpoint(const std::filesystem::path& path, const nlohmann::json& header,
                     const ParamStore& params);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Copy weights into a freshly built model whose parameter table must match
/// the checkpoint exactly (names, shapes, order).
void restore_params(ParamStore& dst, const Checkpoint& ck);

} // namespace dvslr
