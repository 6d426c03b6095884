#include "sdstab/json_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <ostream>

namespace sdstab {

Json to_json(Scalar z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

Scalar scalar_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw Error(ErrorKind::kInvalidArgument,
              "expected a number or an [re, im] pair, got " + j.dump());
}

Matrix matrix_from_json(const Json& j) {
  require(j.is_array() && !j.empty(), "matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  require(j[0].is_array(), "matrix rows must be arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    require(row.is_array() && static_cast<Eigen::Index>(row.size()) == cols,
            "matrix rows must have equal length");
    for (Eigen::Index k = 0; k < cols; ++k)
      m(i, k) = scalar_from_json(row[static_cast<std::size_t>(k)]);
  }
  return m;
}

Vector vector_from_json(const Json& j) {
  require(j.is_array(), "vector must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = scalar_from_json(j[i]);
  return v;
}

Json to_json(const ContinuousSystem& sys) {
  return {{"A", to_json(sys.A())}, {"B", to_json(sys.B())}};
}

Json to_json(const SpectralSystem& sys) {
  Json j;
  const bool heat = sys.symbol().kind == Symbol::Kind::kFractionalHeat;
  j["symbol"] = heat ? "frac_heat" : "schrodinger";
  if (heat) {
    j["s"] = sys.symbol().s;
    j["c"] = sys.symbol().c;
  }
  j["modes"] = sys.modes();
  j["mask"] = sys.mask();
  return j;
}

Json to_json(const ObservabilityCertificate& cert) {
  return {{"mode", to_string(cert.mode)},
          {"T", cert.T},
          {"N", cert.N},
          {"C", cert.C},
          {"delta", cert.delta},
          {"margin", cert.margin},
          {"feasible", cert.feasible()},
          {"kernel_dim", cert.kernel_dim},
          {"verdict", to_string(cert.verdict)},
          {"kernel_norm", cert.kernel_norm}};
}

Json to_json(const RiccatiSolution& sol) {
  return {{"K", to_json(sol.K)},
          {"residual", sol.residual},
          {"iterations", sol.iterations},
          {"converged", sol.converged}};
}

Json to_json(const FeedbackGain& gain) {
  return {{"F", to_json(gain.F)},
          {"closed_loop", to_json(gain.closed_loop)},
          {"spectral_radius", gain.spectral_radius}};
}

Json to_json(const CounterexampleWitness& w) {
  return {{"T", w.T},
          {"N", w.N},
          {"epsilon", w.epsilon},
          {"eta", w.eta},
          {"support", {w.support.first, w.support.second}},
          {"bound", w.bound},
          {"observed", w.observed},
          {"grid_spacing", w.grid_spacing}};
}

namespace {

double number_or(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  require(j[key].is_number(), std::string(key) + " must be a number");
  return j[key].get<double>();
}

std::vector<double> real_list(const Json& j, const char* key) {
  require(j.contains(key) && j[key].is_array(),
          std::string(key) + " must be an array");
  std::vector<double> out;
  for (const Json& x : j[key]) {
    require(x.is_number(), std::string(key) + " entries must be numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

}  // namespace

AnySystem system_from_json(const Json& j) {
  require(j.is_object(), "system document must be a JSON object");
  if (j.contains("A")) {
    require(j.contains("B"), "dense system needs both A and B");
    return ContinuousSystem(matrix_from_json(j["A"]), matrix_from_json(j["B"]));
  }
  require(j.contains("symbol") && j["symbol"].is_string(),
          "system needs either A/B or a symbol");
  const auto name = j["symbol"].get<std::string>();
  Symbol symbol;
  if (name == "frac_heat") {
    symbol = Symbol::fractional_heat(number_or(j, "s", 2.0), number_or(j, "c", 0.0));
    require(symbol.s > 1.0, "fractional order s must exceed 1");
    require(symbol.c >= 0.0, "shift c must be non-negative");
  } else if (name == "schrodinger") {
    symbol = Symbol::schrodinger();
  } else {
    throw Error(ErrorKind::kInvalidArgument, "unknown symbol '" + name + "'");
  }
  auto modes = real_list(j, "modes");
  std::vector<double> mask = j.contains("mask")
                                 ? real_list(j, "mask")
                                 : std::vector<double>(modes.size(), 1.0);
  return SpectralSystem(std::move(modes), symbol, std::move(mask));
}

ContinuousSystem dense_system(const AnySystem& sys) {
  if (const auto* spectral = std::get_if<SpectralSystem>(&sys))
    return to_dense(*spectral);
  return std::get<ContinuousSystem>(sys);
}

std::string system_hash(const ContinuousSystem& sys) {
  const std::string text = to_json(sys).dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const Json& header) {
  os << "# " << header.dump() << '\n';
  const Eigen::Index n = traj.states.empty() ? 0 : traj.states.front().size();
  const Eigen::Index m = traj.controls.empty() ? 0 : traj.controls.front().size();
  os << "t,norm";
  for (Eigen::Index i = 0; i < n; ++i) os << ",y" << i << "_re,y" << i << "_im";
  for (Eigen::Index i = 0; i < m; ++i) os << ",u" << i << "_re,u" << i << "_im";
  os << '\n';
  char buf[32];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    os << buf;
  };
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    put(traj.times[k]);
    os << ',';
    put(traj.states[k].norm());
    for (Eigen::Index i = 0; i < n; ++i) {
      os << ',';
      put(traj.states[k](i).real());
      os << ',';
      put(traj.states[k](i).imag());
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      os << ',';
      put(traj.controls[k](i).real());
      os << ',';
      put(traj.controls[k](i).imag());
    }
    os << '\n';
  }
}

}  // namespace sdstab
