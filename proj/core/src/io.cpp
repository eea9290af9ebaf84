#include "wbary/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace wbary::io {
namespace {

template <class Fn>
auto guarded(const char* what, Fn fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string(what) + ": " + e.what());
  }
}

std::vector<double> values_of(const json& j) { return j.get<std::vector<double>>(); }

}  // namespace

json to_json(const QuantileGrid& g) {
  return {{"m", g.size()}, {"values", std::vector<double>(g.values().begin(), g.values().end())}};
}

QuantileGrid grid_from_json(const json& j) {
  return guarded("quantile grid", [&] {
    const auto m = j.at("m").get<std::size_t>();
    auto values = values_of(j.at("values"));
    if (values.size() != m)
      throw Error(ErrorCode::InvalidGrid, "values length " + std::to_string(values.size()) + " != m " + std::to_string(m));
    return QuantileGrid(std::move(values));
  });
}

json to_json(const ScatterLocationMeasure& m) {
  json sigma = json::array();
  for (Eigen::Index i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.dim(); ++k) row.push_back(m.cov()(i, k));
    sigma.push_back(row);
  }
  return {{"b", std::vector<double>(m.mean().data(), m.mean().data() + m.dim())}, {"sigma", sigma}};
}

namespace {

Matrix matrix_from_json(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  const auto q = static_cast<Eigen::Index>(rows.size());
  Matrix out(q, q);
  for (Eigen::Index i = 0; i < q; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != q) throw Error(ErrorCode::DimensionMismatch, "matrix must be square");
    for (Eigen::Index k = 0; k < q; ++k) out(i, k) = rows[i][k];
  }
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(row);
  }
  return out;
}

}  // namespace

ScatterLocationMeasure scatter_from_json(const json& j) {
  return guarded("scatter-location measure", [&] {
    const auto b = values_of(j.at("b"));
    Vector mean = Eigen::Map<const Vector>(b.data(), static_cast<Eigen::Index>(b.size()));
    return ScatterLocationMeasure(std::move(mean), matrix_from_json(j.at("sigma")));
  });
}

json to_json(const CopulaSpec& c) {
  if (c.kind == CopulaKind::Independence) return {{"kind", "independence"}, {"params", nullptr}};
  return {{"kind", "gaussian"}, {"params", {{"rho", matrix_to_json(c.correlation)}}}};
}

CopulaSpec copula_spec_from_json(const json& j) {
  return guarded("copula", [&] {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "independence") return CopulaSpec::independence();
    if (kind == "gaussian") return CopulaSpec::gaussian(matrix_from_json(j.at("params").at("rho")));
    throw Error(ErrorCode::InvalidSpec, "unknown copula kind '" + kind + "'");
  });
}

json to_json(const CopulaMeasure& m) {
  json marginals = json::array();
  for (const auto& g : m.marginals()) marginals.push_back(to_json(g));
  return {{"copula", to_json(m.copula())}, {"marginals", marginals}};
}

CopulaMeasure copula_from_json(const json& j) {
  return guarded("copula measure", [&] {
    std::vector<QuantileGrid> marginals;
    for (const auto& g : j.at("marginals")) marginals.push_back(grid_from_json(g));
    return CopulaMeasure(copula_spec_from_json(j.at("copula")), std::move(marginals));
  });
}

json to_json(const SphericalMeasure& m) {
  return {{"generator", m.generator_id()}, {"profile", to_json(m.profile().grid())}};
}

SphericalMeasure spherical_from_json(const json& j) {
  return guarded("spherical measure", [&] {
    return SphericalMeasure(j.at("generator").get<std::string>(), RadialProfile(grid_from_json(j.at("profile"))));
  });
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_series_csv(std::ostream& os, std::span<const StepScalars> series) {
  os << "k,gamma,F,grad_norm_sq,w2_ref\n";
  for (const auto& s : series)
    os << s.k << ',' << format_double(s.gamma) << ',' << format_double(s.F) << ',' << format_double(s.grad_norm_sq)
       << ',' << format_double(s.w2_ref) << '\n';
}

std::vector<StepScalars> read_series_csv(std::istream& is) {
  std::vector<StepScalars> out;
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::EmptyFile, "series csv is empty");
  auto parse = [](const std::string& cell) {
    if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
      throw Error(ErrorCode::NonNumeric, "series cell '" + cell + "'");
    return v;
  };
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw Error(ErrorCode::RaggedRows, "series row has " + std::to_string(cells.size()) + " cells");
    StepScalars s;
    s.k = static_cast<std::size_t>(parse(cells[0]));
    s.gamma = parse(cells[1]);
    s.F = parse(cells[2]);
    s.grad_norm_sq = parse(cells[3]);
    s.w2_ref = parse(cells[4]);
    out.push_back(s);
  }
  return out;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + path.parent_path().string());
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

void write_json_file(const std::filesystem::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

}  // namespace wbary::io
