#pragma once

#include <cmath>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wbary/copula.hpp"
#include "wbary/quantile1d.hpp"
#include "wbary/scatter_location.hpp"
#include "wbary/solver.hpp"
#include "wbary/spherical.hpp"

namespace wbary::io {

using json = nlohmann::json;

// {"m": M, "values": [...]}, values.size() == M.
json to_json(const QuantileGrid& g);
QuantileGrid grid_from_json(const json& j);

// {"b": [...], "sigma": [[...], ...]}; symmetry is checked on load.
json to_json(const ScatterLocationMeasure& m);
ScatterLocationMeasure scatter_from_json(const json& j);

// {"copula": {"kind": "independence" | "gaussian", "params": {"rho": [[...]]} | null},
//  "marginals": [grid, ...]}
json to_json(const CopulaSpec& c);
CopulaSpec copula_spec_from_json(const json& j);
json to_json(const CopulaMeasure& m);
CopulaMeasure copula_from_json(const json& j);

// {"generator": tag, "profile": {"m": M, "values": [...]}}
json to_json(const SphericalMeasure& m);
SphericalMeasure spherical_from_json(const json& j);

template <class M>
struct MeasureCodec;

template <>
struct MeasureCodec<QuantileGrid> {
  static constexpr std::string_view kFamily = "univariate";
  static json encode(const QuantileGrid& m) { return to_json(m); }
  static QuantileGrid decode(const json& j) { return grid_from_json(j); }
};

template <>
struct MeasureCodec<ScatterLocationMeasure> {
  static constexpr std::string_view kFamily = "scatter-location";
  static json encode(const ScatterLocationMeasure& m) { return to_json(m); }
  static ScatterLocationMeasure decode(const json& j) { return scatter_from_json(j); }
};

template <>
struct MeasureCodec<CopulaMeasure> {
  static constexpr std::string_view kFamily = "copula";
  static json encode(const CopulaMeasure& m) { return to_json(m); }
  static CopulaMeasure decode(const json& j) { return copula_from_json(j); }
};

template <>
struct MeasureCodec<SphericalMeasure> {
  static constexpr std::string_view kFamily = "spherical";
  static json encode(const SphericalMeasure& m) { return to_json(m); }
  static SphericalMeasure decode(const json& j) { return spherical_from_json(j); }
};

// NaN is stored as null.
inline json number_or_null(double x) { return std::isnan(x) ? json(nullptr) : json(x); }
inline double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

template <class M>
json record_to_json(const RunRecord<M>& rec) {
  json series = {{"k", json::array()},  {"gamma", json::array()},        {"batch_size", json::array()},
                 {"F", json::array()},  {"grad_norm_sq", json::array()}, {"w2_ref", json::array()}};
  for (const auto& s : rec.series) {
    series["k"].push_back(s.k);
    series["gamma"].push_back(s.gamma);
    series["batch_size"].push_back(s.batch_size);
    series["F"].push_back(number_or_null(s.F));
    series["grad_norm_sq"].push_back(number_or_null(s.grad_norm_sq));
    series["w2_ref"].push_back(number_or_null(s.w2_ref));
  }
  json snapshots = json::array();
  for (const auto& snap : rec.snapshots)
    snapshots.push_back({{"k", snap.k}, {"family", MeasureCodec<M>::kFamily}, {"measure", MeasureCodec<M>::encode(snap.measure)}});
  return {{"family", rec.family},         {"seed", rec.seed},   {"schedule", rec.schedule},
          {"wall_time_s", rec.wall_time_s}, {"stop_reason", rec.stop_reason}, {"steps", rec.steps()},
          {"series", series},             {"snapshots", snapshots}};
}

template <class M>
RunRecord<M> record_from_json(const json& j) {
  try {
    RunRecord<M> rec;
    rec.family = j.at("family").get<std::string>();
    if (rec.family != MeasureCodec<M>::kFamily)
      throw Error(ErrorCode::InvalidSpec, "record family '" + rec.family + "' does not match");
    rec.seed = j.at("seed").get<std::uint64_t>();
    rec.schedule = j.at("schedule").get<std::string>();
    rec.wall_time_s = j.at("wall_time_s").get<double>();
    rec.stop_reason = j.at("stop_reason").get<std::string>();
    const auto& s = j.at("series");
    const std::size_t n = s.at("k").size();
    for (const char* key : {"gamma", "batch_size", "F", "grad_norm_sq", "w2_ref"})
      if (s.at(key).size() != n) throw Error(ErrorCode::ParseError, std::string("series column '") + key + "' length");
    for (std::size_t i = 0; i < n; ++i) {
      StepScalars row;
      row.k = s["k"][i].get<std::size_t>();
      row.gamma = s["gamma"][i].get<double>();
      row.batch_size = s["batch_size"][i].get<std::size_t>();
      row.F = number_from(s["F"][i]);
      row.grad_norm_sq = number_from(s["grad_norm_sq"][i]);
      row.w2_ref = number_from(s["w2_ref"][i]);
      rec.series.push_back(row);
    }
    for (const auto& snap : j.at("snapshots"))
      rec.snapshots.push_back({snap.at("k").get<std::size_t>(), MeasureCodec<M>::decode(snap.at("measure"))});
    return rec;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("run record: ") + e.what());
  }
}

// Columns k,gamma,F,grad_norm_sq,w2_ref; doubles in shortest round-trip form.
void write_series_csv(std::ostream& os, std::span<const StepScalars> series);
std::vector<StepScalars> read_series_csv(std::istream& is);

std::string format_double(double x);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace wbary::io
