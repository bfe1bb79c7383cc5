#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "nucseg/metrics.hpp"
#include "nucseg/phantom.hpp"
#include "nucseg/postproc.hpp"
#include "nucseg/sweep.hpp"

// Structured-text forms of configs and reports. Objects keep a fixed field
// order so emitted files are diffable and byte-stable.

namespace nucseg::io {

using Json = nlohmann::ordered_json;

Json to_json(const PostprocConfig& cfg);
PostprocConfig postproc_config_from_json(const Json& j);

Json to_json(const NmsConfig& cfg);

Json to_json(const PhantomConfig& cfg);
/// Missing fields keep their defaults.
PhantomConfig phantom_config_from_json(const Json& j);

/// Mirrors the results table layout: avAP first, then AP at 0.10 ... 0.90.
Json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const Json& j);

/// Paths inside a spec file are resolved relative to `base_dir`.
SweepSpec sweep_spec_from_json(const Json& j, const std::filesystem::path& base_dir = {});
Json to_json(const SweepResult& result);

/// Pretty-printed with two-space indentation and a trailing newline.
std::string dump(const Json& j);
Json parse_json_file(const std::filesystem::path& path);

}  // namespace nucseg::io
