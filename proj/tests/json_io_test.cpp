#include "sdstab/json_io.hpp"

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"

namespace sdstab {
namespace {

TEST(JsonMatrix, EntriesArePairsInRowMajorOrder) {
  Matrix m(2, 2);
  m << Scalar(1, 2), Scalar(3, 0), Scalar(0, -1), Scalar(4, 5);
  EXPECT_EQ(to_json(m).dump(), "[[[1.0,2.0],[3.0,0.0]],[[0.0,-1.0],[4.0,5.0]]]");
}

TEST(JsonMatrix, AcceptsPlainNumbers) {
  const Matrix m = matrix_from_json(Json::parse("[[0, 1], [-1, [0, 2]]]"));
  EXPECT_EQ(m(0, 1), Scalar(1.0));
  EXPECT_EQ(m(1, 0), Scalar(-1.0));
  EXPECT_EQ(m(1, 1), Scalar(0.0, 2.0));
}

TEST(JsonMatrix, RejectsMalformedInput) {
  EXPECT_THROW(matrix_from_json(Json::parse("[]")), Error);
  EXPECT_THROW(matrix_from_json(Json::parse("[[1, 2], [3]]")), Error);
  EXPECT_THROW(matrix_from_json(Json::parse("[[1, \"x\"]]")), Error);
  EXPECT_THROW(matrix_from_json(Json::parse("[[[1, 2, 3]]]")), Error);
  EXPECT_THROW(matrix_from_json(Json::parse("{\"a\": 1}")), Error);
}

TEST(JsonSystem, DenseDocument) {
  const auto sys = system_from_json(Json::parse(R"({"A": [[0, 1], [-1, 0]], "B": [[0], [1]]})"));
  const auto& dense = std::get<ContinuousSystem>(sys);
  EXPECT_EQ(dense.state_dim(), 2);
  EXPECT_EQ(dense.input_dim(), 1);
  EXPECT_EQ(dense.A()(1, 0), Scalar(-1.0));
}

TEST(JsonSystem, SpectralDocuments) {
  const auto heat = system_from_json(Json::parse(
      R"({"symbol": "frac_heat", "s": 1.5, "c": 1, "modes": [-1, 0, 1], "mask": [1, 0, 1]})"));
  const auto& h = std::get<SpectralSystem>(heat);
  EXPECT_EQ(h.symbol().s, 1.5);
  EXPECT_EQ(h.mask()[1], 0.0);

  const auto schr =
      system_from_json(Json::parse(R"({"symbol": "schrodinger", "modes": [1, 2]})"));
  EXPECT_TRUE(std::get<SpectralSystem>(schr).symbol().unitary());
  EXPECT_EQ(dense_system(schr).A()(1, 1), Scalar(0.0, 4.0));
}

TEST(JsonSystem, RejectsMalformedDocuments) {
  for (const char* doc : {
           R"([1, 2])",
           R"({"A": [[1]]})",
           R"({"A": [[1, 0]], "B": [[1]]})",
           R"({"symbol": "wave", "modes": [1]})",
           R"({"symbol": "frac_heat", "s": 0.5, "modes": [1]})",
           R"({"symbol": "frac_heat", "c": -1, "modes": [1]})",
           R"({"symbol": "schrodinger"})",
           R"({"symbol": "schrodinger", "modes": [1, 1]})",
           R"({"symbol": "schrodinger", "modes": [1], "mask": [2]})",
       }) {
    try {
      system_from_json(Json::parse(doc));
      ADD_FAILURE() << "accepted " << doc;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kInvalidArgument) << doc;
    }
  }
}

TEST(JsonSchema, CertificateKeys) {
  ObservabilityCertificate cert;
  cert.mode = ObservationMode::kDiscrete;
  cert.T = 1.0;
  cert.N = 2;
  const Json j = to_json(cert);
  for (const char* key : {"mode", "T", "N", "C", "delta", "margin", "feasible", "kernel_dim"})
    EXPECT_TRUE(j.contains(key)) << key;
}

TEST(JsonSchema, WitnessKeys) {
  CounterexampleWitness w;
  w.support = {1.0, 2.0};
  const Json j = to_json(w);
  for (const char* key :
       {"T", "N", "epsilon", "eta", "support", "bound", "observed", "grid_spacing"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["support"], Json::array({1.0, 2.0}));
}

TEST(JsonSchema, RiccatiAndGain) {
  RiccatiSolution sol{Matrix::Identity(2, 2), 1e-13, 4, true};
  const Json j = to_json(sol);
  EXPECT_EQ(j["K"][1][1], Json::array({1.0, 0.0}));
  EXPECT_TRUE(j["converged"].get<bool>());
  FeedbackGain gain{Matrix::Zero(1, 2), Matrix::Identity(2, 2), 1.0};
  EXPECT_EQ(to_json(gain)["F"].size(), 1u);
}

TEST(SystemHash, StableAndSensitive) {
  Matrix A = Matrix::Zero(2, 2);
  const ContinuousSystem a(A, Matrix::Ones(2, 1));
  EXPECT_EQ(system_hash(a), system_hash(ContinuousSystem(A, Matrix::Ones(2, 1))));
  EXPECT_EQ(system_hash(a).size(), 16u);
  A(0, 1) = 1e-300;
  EXPECT_NE(system_hash(a), system_hash(ContinuousSystem(A, Matrix::Ones(2, 1))));
}

TEST(TrajectoryCsv, HeaderAndColumns) {
  Trajectory traj;
  traj.times = {0.0, 0.5};
  traj.states = {Vector::Constant(2, Scalar(1, -1)), Vector::Constant(2, Scalar(0.5))};
  traj.controls = {Vector::Constant(1, Scalar(-1)), Vector::Constant(1, Scalar(-0.5))};
  std::ostringstream os;
  write_trajectory_csv(os, traj, {{"law_kind", "constant"}});
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, R"(# {"law_kind":"constant"})");
  std::getline(is, line);
  EXPECT_EQ(line, "t,norm,y0_re,y0_im,y1_re,y1_im,u0_re,u0_im");
  std::getline(is, line);
  EXPECT_EQ(line, "0,2,1,-1,1,-1,-1,0");
  std::getline(is, line);
  EXPECT_EQ(line, "0.5,0.70710678118654757,0.5,0,0.5,0,-0.5,0");
}

TEST(JsonRoundTrip, MatricesAndSystemsSurviveBitExactly) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix A = oracle::random_complex(rng, 3, 3, std::pow(10.0, trial % 7 - 3));
    const Matrix B = oracle::random_complex(rng, 3, 2);
    const ContinuousSystem sys(A, B);
    const Json doc = Json::parse(to_json(sys).dump());
    const auto back = std::get<ContinuousSystem>(system_from_json(doc));
    EXPECT_EQ(back.A(), A);
    EXPECT_EQ(back.B(), B);
    EXPECT_EQ(system_hash(back), system_hash(sys));
  }
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> modes, mask;
    for (int k = 0; k < 6; ++k) {
      modes.push_back(k + 0.25 * u(rng) / 5.0);
      mask.push_back((u(rng) + 5.0) / 10.0);
    }
    const SpectralSystem sys(modes, Symbol::fractional_heat(1.2 + trial * 0.1, 0.5), mask);
    const auto back =
        std::get<SpectralSystem>(system_from_json(Json::parse(to_json(sys).dump())));
    EXPECT_EQ(back.modes(), modes);
    EXPECT_EQ(back.mask(), mask);
    EXPECT_EQ(back.symbol().s, sys.symbol().s);
    EXPECT_EQ(back.symbol().c, 0.5);
  }
}

}  // namespace
}  // namespace sdstab
