/**
 * @file config.hpp
 * @brief JSON form of SimConfig.
 *
 * {
 *   "model": "gbm" | "merton" | "vg" | "garch" | "ou",
 *   "n_steps": 10000, "dt": 1.1574074074074073e-05, "seed": 42,
 *   "start_price": [100, 100], "mu": [0.01, 0.01], "sigma2": [0.1, 0.2],
 *   "rho": 0.5 | [[1, 0.5], [0.5, 1]],
 *   "merton": {"lambda": [..], "a": [..], "b": [..]},
 *   "vg": {"beta": [..], "subordinator": "shared" | "independent" | "degenerate"},
 *   "garch": {"theta": [..], "w": [..], "lambda": [..], "start_variance": [..],
 *             "variant": "andersen" | "reno"},
 *   "ou": {"theta": [..], "long_term_price": [..]}
 * }
 *
 * Every key is optional; absent keys keep default_config(model). Unknown
 * keys are rejected.
 */

#pragma once

#include "epps/simulators.hpp"

#include <json.hpp>

namespace epps
{

/// @throws InputError naming the offending field.
SimConfig sim_config_from_json(const nlohmann::json &doc);

nlohmann::json to_json(const SimConfig &config);

/// Parse a JSON file; @throws InputError on I/O or syntax errors.
nlohmann::json read_json_file(const std::string &path);

} // namespace epps
