#pragma once

// JSON conversions shared by the config parser and the dataset manifest.

#include <string>

#include <json.hpp>

#include "pgc/config.hpp"

namespace pgc::detail {

using nlohmann::json;

json to_json(const ChannelParams& p);
json to_json(const Geometry& g);
json to_json(const SplitSizes& s);
json to_json(const nn::TrainConfig& t);

/// Reads fields present in `j` over `p`; `where` prefixes error messages.
void read_channel_params(const json& j, ChannelParams& p, const std::string& where,
                         const char* skip_key = nullptr);
void read_geometry(const json& j, Geometry& g, const std::string& where);
void read_split(const json& j, SplitSizes& s, const std::string& where);

} // namespace pgc::detail
