// tests/unit/backend-test.cc

// Copyright 2026  SR-ASV contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"
#include "srasv/backend/embedding.h"
#include "srasv/backend/plda.h"
#include "srasv/backend/snorm.h"
#include "srasv/base/error.h"
#include "srasv/base/log.h"

using namespace srasv;

namespace {

NetConfig SmallNet() {
  NetConfig c;
  c.input_rows = 16;
  c.input_cols = 16;
  c.block_filters = {8};
  c.n_speakers = 5;
  return c;
}

FeatureMatrix RandomFeature(std::mt19937_64 *rng, int rows, int cols) {
  std::normal_distribution<float> g(0.0f, 1.0f);
  FeatureMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(*rng);
  return m;
}

struct Sampled {
  EmbeddingMatrix x;
  std::vector<int> labels;
};

// Draws from x = mu + y + e with Cholesky factors of Sb and Sw.
Sampled SampleModel(const PldaModel &m, int classes, int per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  const int d = m.dim();
  const Eigen::MatrixXd lb = m.sb.llt().matrixL();
  const Eigen::MatrixXd lw = m.sw.llt().matrixL();
  auto draw = [&] {
    Eigen::VectorXd z(d);
    for (int i = 0; i < d; ++i) z[i] = g(rng);
    return z;
  };
  Sampled s;
  s.x.resize(classes * per_class, d);
  for (int c = 0; c < classes; ++c) {
    const Eigen::VectorXd y = lb * draw();
    for (int j = 0; j < per_class; ++j) {
      s.x.row(c * per_class + j) = (m.mu + y + lw * draw()).transpose();
      s.labels.push_back(c);
    }
  }
  return s;
}

PldaModel TwoDimModel() {
  PldaModel m;
  m.mu = Eigen::Vector2d(0.5, -1.0);
  m.sb.resize(2, 2);
  m.sb << 2.0, 0.6, 0.6, 1.0;
  m.sw.resize(2, 2);
  m.sw << 0.5, -0.1, -0.1, 0.3;
  return m;
}

double FrobeniusRel(const Eigen::MatrixXd &a, const Eigen::MatrixXd &ref) {
  return (a - ref).norm() / ref.norm();
}

// Direct evaluation of log N([a; b]; 0, Sigma) for scalar sides.
double ScalarLogJoint(double a, double b, double var, double cov) {
  const double det = var * var - cov * cov;
  const double quad = (var * a * a - 2 * cov * a * b + var * b * b) / det;
  return -std::log(2 * M_PI) - 0.5 * std::log(det) - 0.5 * quad;
}

}  // namespace

TEST_CASE("embeddings are deterministic 128-vectors that separate inputs") {
  MtlNetwork<float> net(SmallNet());
  net.InitParams(3);
  std::mt19937_64 rng(11);
  std::vector<FeatureMatrix> feats;
  for (int i = 0; i < 5; ++i) feats.push_back(RandomFeature(&rng, 16, 16));
  const EmbeddingMatrix a = ExtractEmbeddings(net, feats, 2);
  const EmbeddingMatrix b = ExtractEmbeddings(net, feats, 4);
  CHECK(a.cols() == 128);
  CHECK(a.rows() == 5);
  CHECK(a == b);
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) CHECK((a.row(i) - a.row(j)).norm() > 1e-6);

  feats.push_back(FeatureMatrix(8, 16));
  CHECK_THROWS_AS(ExtractEmbeddings(net, feats), Error);
}

TEST_CASE("centering and length normalization") {
  EmbeddingMatrix e = EmbeddingMatrix::Zero(1, 6);
  Eigen::VectorXd mu = Eigen::VectorXd::Constant(6, 2.0);
  e.row(0) = mu.transpose();
  e(0, 0) += 3.0;
  e(0, 1) += 4.0;
  const EmbeddingMatrix n = CenterLengthNorm(e, mu);
  CHECK(n(0, 0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(n(0, 1) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(n.row(0).tail(4).norm() == 0.0);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  EmbeddingMatrix r(40, 16);
  for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = u(rng);
  const Eigen::VectorXd m = MeanEmbedding(r);
  const EmbeddingMatrix rn = CenterLengthNorm(r, m);
  for (Eigen::Index i = 0; i < rn.rows(); ++i) CHECK(std::abs(rn.row(i).norm() - 1.0) < 1e-6);
  const Eigen::RowVectorXd residual_sum = (r.rowwise() - m.transpose()).colwise().sum();
  CHECK(residual_sum.cwiseAbs().maxCoeff() < 1e-10);

  CHECK(std::abs(PoolEnrollment(rn.topRows(3)).norm() - 1.0) < 1e-12);
  CHECK_THROWS_AS(CenterLengthNorm(e, e.row(0).transpose()), Error);
  CHECK_THROWS_AS(CenterLengthNorm(e, Eigen::VectorXd::Zero(3)), Error);
}

TEST_CASE("PLDA EM recovers the generating covariances") {
  const PldaModel truth = TwoDimModel();
  const Sampled s = SampleModel(truth, 200, 10, 17);
  const PldaTrainResult r = TrainPlda(s.x, s.labels);
  CHECK_FALSE(r.degenerate);
  CHECK(FrobeniusRel(r.model.sb, truth.sb) < 0.15);
  CHECK(FrobeniusRel(r.model.sw, truth.sw) < 0.15);
  REQUIRE(r.log_likelihood.size() == 11);
  for (std::size_t i = 1; i < r.log_likelihood.size(); ++i)
    CHECK(r.log_likelihood[i] >= r.log_likelihood[i - 1] - 1e-8);
  CHECK(r.model.mu.isApprox(MeanEmbedding(s.x), 1e-6));
  CHECK(r.model.sb.isApprox(r.model.sb.transpose(), 0.0));
  CHECK(r.model.sw.llt().info() == Eigen::Success);
}

TEST_CASE("PLDA log-likelihood matches a direct joint Gaussian") {
  // Scalar model, one class of two samples: joint covariance [[b+w, b], [b, b+w]].
  PldaModel m;
  m.mu = Eigen::VectorXd::Zero(1);
  m.sb = Eigen::MatrixXd::Constant(1, 1, 1.5);
  m.sw = Eigen::MatrixXd::Constant(1, 1, 0.4);
  EmbeddingMatrix x(3, 1);
  x << 0.7, -0.2, 1.1;
  const double expect = ScalarLogJoint(0.7, -0.2, 1.9, 1.5) +
                        (-0.5 * std::log(2 * M_PI * 1.9) - 0.5 * 1.1 * 1.1 / 1.9);
  CHECK(PldaLogLikelihood(m, x, {0, 0, 1}) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("PLDA with one sample per class sets Sw to the floor") {
  SetLogLevel(LogLevel::kSilent);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  EmbeddingMatrix x(30, 3);
  std::vector<int> labels(30);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
  std::iota(labels.begin(), labels.end(), 0);
  const PldaTrainResult r = TrainPlda(x, labels);
  SetLogLevel(LogLevel::kInfo);
  CHECK(r.degenerate);
  const EmbeddingMatrix c = x.rowwise() - x.colwise().mean();
  const double floor = 1e-6 * (c.transpose() * c / 30.0).trace() / 3.0;
  CHECK(r.model.sw.isApprox(floor * Eigen::MatrixXd::Identity(3, 3), 1e-6));
  CHECK_THROWS_AS(TrainPlda(x, std::vector<int>(30, 4)), Error);
}

TEST_CASE("PLDA scalar LLR equals the closed-form oracle") {
  PldaModel m;
  m.mu = Eigen::VectorXd::Zero(1);
  m.sb = Eigen::MatrixXd::Ones(1, 1);
  m.sw = Eigen::MatrixXd::Ones(1, 1);
  const PldaScorer s(m);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  // Same: joint covariance [[2, 1], [1, 2]]; different: diag(2, 2).
  const double oracle = ScalarLogJoint(1, 1, 2, 1) - ScalarLogJoint(1, 1, 2, 0);
  CHECK(std::abs(s.Score(one, one) - oracle) < 1e-9);
  CHECK(std::abs(oracle - (std::log(2.0) - 0.5 * std::log(3.0) + 1.0 / 6.0)) < 1e-12);
  const Eigen::VectorXd a = Eigen::VectorXd::Constant(1, 0.3), b = Eigen::VectorXd::Constant(1, -1.7);
  CHECK(std::abs(s.Score(a, b) - (ScalarLogJoint(0.3, -1.7, 2, 1) - ScalarLogJoint(0.3, -1.7, 2, 0))) <
        1e-9);
  CHECK_THROWS_AS(s.Score(one, Eigen::VectorXd::Ones(2)), Error);
}

TEST_CASE("PLDA scores are symmetric and vanish as Sb goes to zero") {
  const PldaModel truth = TwoDimModel();
  const PldaScorer s(truth);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);
  PldaModel flat = truth;
  flat.sb *= 1e-10;
  const PldaScorer s0(flat);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Vector2d a(g(rng), g(rng)), b(g(rng), g(rng));
    CHECK(std::abs(s.Score(a, b) - s.Score(b, a)) < 1e-9);
    CHECK(std::abs(s0.Score(a, b)) < 1e-6);
  }
}

TEST_CASE("PLDA trial ordering survives a constant shift with re-estimated mean") {
  const PldaModel truth = TwoDimModel();
  const Sampled train = SampleModel(truth, 50, 6, 21);
  const Sampled trials = SampleModel(truth, 10, 2, 22);
  auto ranks = [&](const Eigen::Vector2d &shift) {
    const EmbeddingMatrix xs = train.x.rowwise() + shift.transpose();
    const EmbeddingMatrix ts = trials.x.rowwise() + shift.transpose();
    PldaModel m = TrainPlda(xs, train.labels).model;
    m.mu = MeanEmbedding(xs);
    const PldaScorer s(m);
    std::vector<double> scores;
    for (Eigen::Index i = 0; i < ts.rows(); ++i)
      for (Eigen::Index j = i + 1; j < ts.rows(); ++j)
        scores.push_back(s.Score(ts.row(i).transpose(), ts.row(j).transpose()));
    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] < scores[b]; });
    return order;
  };
  CHECK(ranks(Eigen::Vector2d::Zero()) == ranks(Eigen::Vector2d(4.0, -2.5)));
}

TEST_CASE("PLDA EER falls as the between/within ratio grows") {
  // Brute-force EER over a same/different trial list sampled from the model.
  auto eer = [](double ratio) {
    PldaModel m;
    m.mu = Eigen::VectorXd::Zero(2);
    m.sb = ratio * Eigen::MatrixXd::Identity(2, 2);
    m.sw = Eigen::MatrixXd::Identity(2, 2);
    const Sampled s = SampleModel(m, 100, 2, 31);
    const PldaScorer sc(m);
    std::vector<double> tar, non;
    for (int c = 0; c < 100; ++c) {
      tar.push_back(sc.Score(s.x.row(2 * c).transpose(), s.x.row(2 * c + 1).transpose()));
      non.push_back(sc.Score(s.x.row(2 * c).transpose(), s.x.row((2 * c + 3) % 200).transpose()));
    }
    double best = 1.0;
    for (double t : tar) {
      const double miss = std::count_if(tar.begin(), tar.end(), [&](double v) { return v < t; }) / 100.0;
      const double fa = std::count_if(non.begin(), non.end(), [&](double v) { return v >= t; }) / 100.0;
      best = std::min(best, std::max(miss, fa));
    }
    return best;
  };
  const double e1 = eer(0.25), e2 = eer(1.0), e3 = eer(4.0);
  CHECK(e1 > e2);
  CHECK(e2 > e3);
}

TEST_CASE("PLDA adaptation re-centers and model files round-trip") {
  const PldaModel truth = TwoDimModel();
  const Sampled s = SampleModel(truth, 30, 4, 4);
  const PldaModel m = TrainPlda(s.x, s.labels).model;
  EmbeddingMatrix enroll(2, 2);
  enroll << 1.0, 2.0, 3.0, 4.0;
  const PldaModel a = AdaptPlda(m, enroll);
  CHECK(a.mu.isApprox(Eigen::Vector2d(2.0, 3.0)));
  CHECK(a.sb == m.sb);

  const std::string path = (std::filesystem::temp_directory_path() / "srasv-plda-test.bin").string();
  SavePlda(path, m);
  const PldaModel back = LoadPlda(path);
  CHECK(back.mu == m.mu);
  CHECK(back.sb == m.sb);
  CHECK(back.sw == m.sw);
  std::filesystem::remove(path);
}

TEST_CASE("adaptive s-norm") {
  const std::vector<double> unit = {-1.0, 1.0, -1.0, 1.0};  // mean 0, population std 1
  CHECK(AdaptiveSNorm(0.37, unit, unit, 4) == doctest::Approx(0.37).epsilon(1e-15));

  const std::vector<double> e = {0.5, 2.0, -1.0, 3.0, 1.0};
  const std::vector<double> t = {4.0, 0.0, 2.0, -3.0, 1.0};
  // Top three by hand: e -> {3, 2, 1}, t -> {4, 2, 1}.
  const CohortStats se = TopKStats(e, 3), st = TopKStats(t, 3);
  CHECK(se.mean == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(se.stddev == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
  CHECK(st.mean == doctest::Approx(7.0 / 3.0).epsilon(1e-15));
  CHECK(st.stddev == doctest::Approx(std::sqrt(((25.0 + 1.0 + 16.0) / 9.0) / 3.0)).epsilon(1e-15));
  const double raw = 2.5;
  CHECK(AdaptiveSNorm(raw, e, t, 3) ==
        doctest::Approx(0.5 * ((raw - se.mean) / se.stddev + (raw - st.mean) / st.stddev)));

  const std::vector<double> same = {1.0, 2.0, 3.0};
  CHECK(std::abs(AdaptiveSNorm(2.0, same, same, 3)) < 1e-15);

  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> ce(50), ct(50);
  for (double &v : ce) v = g(rng);
  for (double &v : ct) v = g(rng);
  auto affine = [](std::vector<double> v) {
    for (double &x : v) x = 2.5 * x - 7.0;
    return v;
  };
  for (double s : {-1.0, 0.2, 1.8}) {
    CHECK(std::abs(AdaptiveSNorm(s, ce, ct, 10) - AdaptiveSNorm(2.5 * s - 7.0, affine(ce), affine(ct), 10)) <
          1e-9);
  }

  CHECK_THROWS_AS(TopKStats({1.0, 2.0}, 3), Error);
  CHECK_THROWS_AS(TopKStats({1.0, 2.0}, 1), Error);
  CHECK_THROWS_AS(TopKStats({1.0, 1.0, 1.0}, 2), Error);
  CHECK(DefaultTopK(50) == 50);
  CHECK(DefaultTopK(500) == 200);
}
