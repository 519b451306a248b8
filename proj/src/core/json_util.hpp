/*
 * (C) Copyright 2026 dvslr developers
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <initializer_list>
#include <string>

#include <json.hpp>

#include "core/common.hpp"

namespace dvslr {

/// Reject config objects containing keys we do not understand; silent typos
/// in experiment configs are worse than a hard failure.
inline void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                       const std::string& context) {
    if (!j.is_object())
        throw_usage(context + ": expected a JSON object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                ok = true;
                break;
            }
        if (!ok)
            throw_usage(context + ": unknown key '" + item.key() + "'");
    }
}

inline nlohmann::json parse_json(const std::string& text, const std::string& context) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw_usage(context + ": invalid JSON: " + e.what());
    }
}

} // namespace dvslr
