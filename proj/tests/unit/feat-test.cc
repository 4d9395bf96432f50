// tests/unit/feat-test.cc

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

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"
#include "srasv/base/error.h"
#include "srasv/base/io.h"
#include "srasv/feat/feature-cache.h"
#include "srasv/feat/feature-cqt.h"
#include "srasv/feat/feature-extractor.h"
#include "srasv/feat/feature-llfb.h"
#include "srasv/feat/unify.h"
#include "srasv/feat/wave-io.h"

using namespace srasv;

namespace {

const std::filesystem::path kFixtures = SRASV_FIXTURE_DIR;

Waveform Tone(double hz, double seconds, double amplitude = 1.0) {
  Waveform w;
  const int n = static_cast<int>(seconds * kSampleRate);
  w.samples.resize(n);
  for (int i = 0; i < n; ++i)
    w.samples[i] = static_cast<float>(
        amplitude * std::sin(2.0 * std::numbers::pi * hz * i / kSampleRate));
  return w;
}

const CqtComputer &FullCqt() {
  static CqtComputer cqt{CqtOptions{}};
  return cqt;
}

const LlfbComputer &DefaultLlfb() {
  static LlfbComputer llfb{LlfbOptions{}};
  return llfb;
}

// Direct per-bin projection onto a windowed complex exponential; shares no
// code with the FFT/sparse-kernel path.
double NaiveCqtMagnitude(const std::vector<float> &x, int bin, long center) {
  const double b = 96.0, fs = 16000.0;
  const double fmin = 8000.0 / 512.0;
  const double fk = fmin * std::pow(2.0, bin / b);
  const double alpha = std::pow(2.0, 1.0 / b) - std::pow(2.0, -1.0 / b);
  const double gamma = 228.7 * alpha;
  const double q = 1.0 / (std::pow(2.0, 1.0 / b) - 1.0);
  const long len = std::lround(q * fs / (fk + gamma / alpha));
  std::complex<double> acc = 0.0;
  double wsum = 0.0;
  for (long i = 0; i < len; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2 * std::numbers::pi * i / len);
    wsum += w;
    const long p = center - len / 2 + i;
    const double s = (p >= 0 && p < static_cast<long>(x.size())) ? x[p] : 0.0;
    acc += s * w * std::exp(std::complex<double>(0, -2 * std::numbers::pi * fk * (p - center) / fs));
  }
  return std::abs(acc) / wsum;
}

Eigen::Index ArgmaxRowOfMean(const FeatureMatrix &m) {
  Eigen::VectorXd mean = m.cast<double>().array().exp().rowwise().mean();
  Eigen::Index arg;
  mean.maxCoeff(&arg);
  return arg;
}

}  // namespace

TEST_CASE("read_wav scales int16 samples exactly") {
  Waveform z = ReadWav(kFixtures / "zero_1.wav");
  REQUIRE(z.samples.size() == 1);
  CHECK(z.samples[0] == 0.0f);
  CHECK(z.sample_rate == 16000);

  Waveform h = ReadWav(kFixtures / "half_minus_one.wav");
  REQUIRE(h.samples.size() == 2);
  CHECK(h.samples[0] == 0.5f);
  CHECK(h.samples[1] == -1.0f);
}

TEST_CASE("read_wav matches the independently generated sine fixture") {
  Waveform w = ReadWav(kFixtures / "sine_1k.wav");
  std::string raw = ReadFileBytes(kFixtures / "sine_1k.raw");
  REQUIRE(w.samples.size() == 16000);
  REQUIRE(raw.size() == 32000);
  float peak = 0;
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    std::int16_t v;
    std::memcpy(&v, raw.data() + 2 * i, 2);
    REQUIRE(w.samples[i] * 32768.0f == static_cast<float>(v));
    peak = std::max(peak, std::abs(w.samples[i]));
  }
  CHECK(peak == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("read_wav error paths") {
  std::string good = ReadFileBytes(kFixtures / "half_minus_one.wav");
  auto code_of = [](const std::string &bytes) {
    try {
      ParseWav(bytes, "x");
    } catch (const Error &e) {
      return e.code();
    }
    return Errc::kBadSpec;
  };
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  CHECK(code_of(bad_magic) == Errc::kNotWav);
  CHECK(code_of("RIFF") == Errc::kNotWav);

  std::string stereo = good;
  stereo[22] = 2;  // channel count
  CHECK(code_of(stereo) == Errc::kUnsupportedFormat);
  std::string rate = good;
  std::uint32_t r8k = 8000;
  std::memcpy(&rate[24], &r8k, 4);
  CHECK(code_of(rate) == Errc::kUnsupportedFormat);
  std::string float_fmt = good;
  float_fmt[20] = 3;
  CHECK(code_of(float_fmt) == Errc::kUnsupportedFormat);

  std::string truncated = good.substr(0, good.size() - 1);
  CHECK(code_of(truncated) == Errc::kTruncated);
}

TEST_CASE("wav encode/parse round trip keeps int16 values") {
  Waveform w;
  for (int i = -5; i < 5; ++i) w.samples.push_back(i / 8.0f);
  Waveform back = ParseWav(EncodeWav(w));
  CHECK(back.samples == w.samples);
}

TEST_CASE("CQT grid geometry") {
  CqtOptions o;
  CHECK(o.NumBins() == 864);
  CHECK(o.FMax() == 8000.0);
  CHECK(o.FMin() == doctest::Approx(8000.0 / 512.0));
  CHECK(o.Gamma() == doctest::Approx(228.7 * (std::pow(2.0, 1.0 / 96) - std::pow(2.0, -1.0 / 96))));
  CHECK(o.HopSamples() == 128);
  const double ratio = std::pow(2.0, 1.0 / 96.0);
  for (int k = 0; k + 1 < o.NumBins(); ++k)
    REQUIRE(std::abs(o.CenterFrequency(k + 1) / o.CenterFrequency(k) - ratio) < 1e-12);
  // Window lengths shrink monotonically with frequency.
  for (int k = 0; k + 1 < o.NumBins(); ++k)
    REQUIRE(o.WindowLength(k + 1) <= o.WindowLength(k));
}

TEST_CASE("CQT of silence is the log floor everywhere") {
  Waveform zero;
  zero.samples.assign(2 * kSampleRate, 0.0f);
  FeatureMatrix m = FullCqt().Compute(zero);
  CHECK(m.rows() == 864);
  const float floor = static_cast<float>(std::log(1e-10));
  CHECK((m.array() == floor).all());
}

TEST_CASE("CQT frame count follows the 8 ms hop") {
  Waveform w = Tone(440, 3.2);
  FeatureMatrix m = FullCqt().Compute(w);
  CHECK(std::abs(m.cols() - 400) <= 1);
}

TEST_CASE("CQT rejects signals shorter than the longest window") {
  Waveform w = Tone(440, 0.1);
  CHECK_THROWS_AS(FullCqt().Compute(w), Error);
  try {
    FullCqt().Compute(w);
  } catch (const Error &e) {
    CHECK(e.code() == Errc::kTooShort);
  }
}

TEST_CASE("CQT pure tone at f_min*32 peaks at row 480") {
  const double f = CqtOptions{}.FMin() * 32.0;
  Waveform w = Tone(f, 2.0);
  FeatureMatrix m = FullCqt().Compute(w);
  CHECK(std::abs(ArgmaxRowOfMean(m) - 480) <= 1);

  // Naive oracle: strongest bin around the analytic index, middle frame.
  const long center = 125 * 128 + 64;
  int best = -1;
  double best_mag = -1;
  for (int k = 460; k <= 500; ++k) {
    double mag = NaiveCqtMagnitude(w.samples, k, center);
    if (mag > best_mag) best_mag = mag, best = k;
  }
  CHECK(std::abs(best - 480) <= 1);
  // Sparse-kernel coefficients agree with the direct projection.
  std::vector<double> sig(w.samples.begin(), w.samples.end());
  auto coeffs = FullCqt().FrameCoefficients(sig, center);
  for (int k : {470, 478, 480, 482, 490}) {
    const double naive = NaiveCqtMagnitude(w.samples, k, center);
    CHECK(std::abs(coeffs[k]) == doctest::Approx(naive).epsilon(0.01));
  }
  CHECK(std::abs(coeffs[480]) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("CQT peak-bin property for random tones") {
  const CqtOptions o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> dist(o.FMin() * 4, 7000.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double f = dist(rng);
    const long expected = std::lround(o.bins_per_octave * std::log2(f / o.FMin()));
    FeatureMatrix m = FullCqt().Compute(Tone(f, 1.0));
    CAPTURE(f);
    CHECK(std::abs(ArgmaxRowOfMean(m) - expected) <= 1);
  }
}

TEST_CASE("LLFB silence, frame count and filter layout") {
  Waveform zero;
  zero.samples.assign(kSampleRate, 0.0f);
  FeatureMatrix m = DefaultLlfb().Compute(zero);
  CHECK(m.rows() == 80);
  CHECK(m.cols() == 99);  // (16000 - 320) / 160 + 1
  CHECK((m.array() == static_cast<float>(std::log(1e-10))).all());

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> u(-0.5f, 0.5f);
  Waveform noise;
  for (int i = 0; i < kSampleRate; ++i) noise.samples.push_back(u(rng));
  CHECK(DefaultLlfb().Compute(noise).cols() == 99);

  for (int f = 0; f < 80; ++f)
    CHECK(DefaultLlfb().FilterCenter(f) == doctest::Approx((f + 1) * 8000.0 / 81.0));
}

TEST_CASE("LLFB pure-tone peak is the nearest-centred filter") {
  auto nearest = [](double hz) {
    int best = 0;
    for (int f = 1; f < 80; ++f)
      if (std::abs((f + 1) * 8000.0 / 81.0 - hz) < std::abs((best + 1) * 8000.0 / 81.0 - hz))
        best = f;
    return best;
  };
  CHECK(ArgmaxRowOfMean(DefaultLlfb().Compute(Tone(4000, 1.0))) == nearest(4000));

  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> dist(CqtOptions{}.FMin() * 4, 7000.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double f = dist(rng);
    CAPTURE(f);
    CHECK(ArgmaxRowOfMean(DefaultLlfb().Compute(Tone(f, 1.0))) == nearest(f));
  }
}

TEST_CASE("LLFB rejects sub-frame input") {
  Waveform w;
  w.samples.assign(100, 0.f);
  CHECK_THROWS_AS(DefaultLlfb().Compute(w), Error);
}

TEST_CASE("unify keeps, truncates or tiles columns") {
  std::mt19937_64 rng(1);
  std::normal_distribution<float> n;
  auto random_matrix = [&](int r, int c) {
    FeatureMatrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
    return m;
  };
  FeatureMatrix same = random_matrix(864, 400);
  CHECK(Unify(same, FeatureKind::kCqt).matrix == same);

  FeatureMatrix shortm = random_matrix(864, 150);
  UnifiedFeature tiled = Unify(shortm, FeatureKind::kCqt);
  REQUIRE(tiled.matrix.cols() == 400);
  for (int j = 0; j < 400; ++j) REQUIRE(tiled.matrix.col(j) == shortm.col(j % 150));

  FeatureMatrix longm = random_matrix(80, 1000);
  UnifiedFeature cut = Unify(longm, FeatureKind::kLlfb);
  CHECK(cut.matrix == longm.leftCols(400));
  CHECK(Unify(cut.matrix, FeatureKind::kLlfb).matrix == cut.matrix);

  CHECK_THROWS_AS(Unify(FeatureMatrix(80, 0), FeatureKind::kLlfb), Error);
}

TEST_CASE("feature extraction is deterministic and shape-stable") {
  Waveform w = ParseWav(ReadFileBytes(kFixtures / "sine_1k.wav"));
  FeatureOptions llfb;
  llfb.kind = FeatureKind::kLlfb;
  FeatureExtractor ex(llfb);
  UnifiedFeature a = ex.Extract(w), b = ex.Extract(w);
  CHECK(a.matrix == b.matrix);
  CHECK(a.matrix.rows() == 80);
  CHECK(a.matrix.cols() == 400);
  CHECK(a.matrix.allFinite());

  Waveform longer = Tone(300, 5.0, 0.3);
  FeatureOptions cqt;
  UnifiedFeature c = FeatureExtractor(cqt).Extract(longer);
  CHECK(c.matrix.rows() == 864);
  CHECK(c.matrix.cols() == 400);
  CHECK(c.matrix.allFinite());
}

TEST_CASE("mean/variance normalization") {
  FeatureMatrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  NormalizeMeanVariance(&m);
  CHECK(m.cast<double>().mean() == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(m.cast<double>().array().square().mean() == doctest::Approx(1.0));
  FeatureMatrix c = FeatureMatrix::Constant(3, 3, -23.0f);
  NormalizeMeanVariance(&c);
  CHECK((c.array() == 0.0f).all());
}

TEST_CASE("feature cache and manifest round trip") {
  auto dir = std::filesystem::temp_directory_path() / "srasv-feat-test";
  std::filesystem::remove_all(dir);
  UnifiedFeature f;
  f.kind = FeatureKind::kLlfb;
  f.matrix = FeatureMatrix::Random(80, 400);
  WriteFeatureCache(dir / "u1.feat", f);
  std::string bytes = ReadFileBytes(dir / "u1.feat");
  CHECK(bytes.substr(0, 4) == "SRAV");
  CHECK(bytes.size() == 4 + 1 + 4 + 4 + 80 * 400 * 4);
  UnifiedFeature g = ReadFeatureCache(dir / "u1.feat");
  CHECK(g.kind == FeatureKind::kLlfb);
  CHECK(g.matrix == f.matrix);

  FeatureManifest m;
  m.Add("u1", "u1.feat");
  CHECK_THROWS_AS(m.Add("u1", "x"), Error);
  m.Save(dir / "manifest.txt");
  FeatureManifest back = FeatureManifest::Load(dir / "manifest.txt");
  CHECK(back.Read("u1").matrix == f.matrix);
  std::filesystem::remove_all(dir);
}
