#pragma once

// JSON forms of the data that leaves the process: layouts, path sets and link statistics
// (regression fixtures), validation reports, and experiment configs / manifests.

#include <string>

#include "json.hpp"

#include "cfotfs/channel.hpp"
#include "cfotfs/estimation.hpp"
#include "cfotfs/experiments.hpp"
#include "cfotfs/geometry.hpp"
#include "cfotfs/montecarlo.hpp"

namespace cfotfs {

using json = nlohmann::json;

void to_json(json& j, const Layout& layout);
void from_json(const json& j, Layout& layout);

void to_json(json& j, const DdPath& path);
void from_json(const json& j, DdPath& path);
void to_json(json& j, const PathSet& set);
void from_json(const json& j, PathSet& set);

void to_json(json& j, const LinkStats& stats);
void from_json(const json& j, LinkStats& stats);

void to_json(json& j, const TermEstimates& e);
void to_json(json& j, const ValidationReport& report);

void to_json(json& j, const ExperimentConfig& config);
/// Overrides the fields present in `j`; absent keys keep the preset value.
void apply_overrides(const json& j, ExperimentConfig& config);

/// 64-bit FNV-1a, hex encoded.
std::string content_hash(const std::string& data);

}  // namespace cfotfs
