/*
 * Copyright 2026 The palml Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "palml/preprocess.h"

#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "palml/stats.h"
#include "test_util.h"

namespace palml {

inline void PrintTo(NormMethod m, std::ostream* os) { *os << to_string(m); }

namespace {

using testing::make_record;

constexpr NormMethod kMethods[] = {NormMethod::kZScore, NormMethod::kMinMax,
                                   NormMethod::kMaxAbs, NormMethod::kRobust};

TEST(FitNormalizer, ZScoreUsesPopulationStd) {
  const std::vector<double> col = {1, 2, 3};
  const Normalizer n = fit_normalizer(col, NormMethod::kZScore);
  EXPECT_DOUBLE_EQ(n.center, 2.0);
  EXPECT_NEAR(n.scale, 0.816496580927726, 1e-12);
  EXPECT_DOUBLE_EQ(n.apply(2.0), 0.0);
}

TEST(FitNormalizer, MinMaxDoesNotClip) {
  const std::vector<double> col = {0, 13, 81};
  const Normalizer n = fit_normalizer(col, NormMethod::kMinMax);
  EXPECT_DOUBLE_EQ(n.center, 0.0);
  EXPECT_DOUBLE_EQ(n.scale, 81.0);
  EXPECT_DOUBLE_EQ(n.apply(81.0), 1.0);
  EXPECT_NEAR(n.apply(100.0), 100.0 / 81.0, 1e-12);
}

TEST(FitNormalizer, RobustUsesMedianAndIqr) {
  const std::vector<double> col = {5, 1, 4, 2, 3};
  const Normalizer n = fit_normalizer(col, NormMethod::kRobust);
  EXPECT_DOUBLE_EQ(n.center, 3.0);
  EXPECT_DOUBLE_EQ(n.scale, 2.0);
}

TEST(FitNormalizer, MaxAbs) {
  const std::vector<double> col = {-4, 1, 2};
  const Normalizer n = fit_normalizer(col, NormMethod::kMaxAbs);
  EXPECT_DOUBLE_EQ(n.apply(-4.0), -1.0);
  EXPECT_DOUBLE_EQ(n.apply(2.0), 0.5);
}

TEST(FitNormalizer, ConstantColumnMapsToZero) {
  const std::vector<double> col = {3, 3, 3};
  for (NormMethod m : kMethods) {
    const Normalizer n = fit_normalizer(col, m);
    EXPECT_TRUE(n.degenerate()) << to_string(m);
    EXPECT_EQ(n.apply(3.0), 0.0);
    EXPECT_EQ(n.apply(10.0), 0.0);
  }
}

TEST(FitNormalizer, RejectsEmptyAndNonFinite) {
  EXPECT_EQ(testing::error_code_of(
                [] { fit_normalizer(std::vector<double>{}, NormMethod::kZScore); }),
            ErrorCode::kEmptyDataset);
  EXPECT_EQ(testing::error_code_of([] {
              fit_normalizer(std::vector<double>{1.0, NAN}, NormMethod::kZScore);
            }),
            ErrorCode::kNonFinite);
}

class NormalizerProperties : public ::testing::TestWithParam<NormMethod> {};

TEST_P(NormalizerProperties, RoundTripAndRange) {
  std::mt19937_64 rng(3);
  std::lognormal_distribution<double> dist(1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> col(37);
    for (double& v : col) v = dist(rng) - 2.0;
    const Normalizer n = fit_normalizer(col, GetParam());
    const auto z = apply_normalizer(n, col);
    for (std::size_t i = 0; i < col.size(); ++i) {
      ASSERT_NEAR(n.inverse(z[i]), col[i], 1e-9);
    }
    switch (GetParam()) {
      case NormMethod::kZScore:
        EXPECT_NEAR(mean(z), 0.0, 1e-9);
        EXPECT_NEAR(standard_deviation(z), 1.0, 1e-9);
        break;
      case NormMethod::kMinMax:
        for (double v : z) ASSERT_TRUE(v >= 0.0 && v <= 1.0);
        break;
      case NormMethod::kMaxAbs:
        for (double v : z) ASSERT_TRUE(v >= -1.0 && v <= 1.0);
        break;
      case NormMethod::kRobust:
        EXPECT_NEAR(median(z), 0.0, 1e-9);
        break;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllMethods, NormalizerProperties, ::testing::ValuesIn(kMethods),
                         [](const ::testing::TestParamInfo<NormMethod>& info) {
                           return std::string(to_string(info.param));
                         });

TEST(ParseNormMethod, KnownNames) {
  for (NormMethod m : kMethods) EXPECT_EQ(parse_norm_method(to_string(m)), m);
  EXPECT_THROW(parse_norm_method("l2"), Error);
}

TEST(OneHot, FirstAppearanceOrder) {
  const std::vector<std::string> tokens = {"air", "argon", "air"};
  const OneHotEncoder enc = fit_one_hot(tokens);
  EXPECT_EQ(enc.vocabulary(), (std::vector<std::string>{"air", "argon"}));
  EXPECT_EQ(apply_one_hot(enc, "argon"), (std::vector<double>{0, 1}));
}

TEST(OneHot, UnknownTokenIsZerosWithWarning) {
  const OneHotEncoder enc(std::vector<std::string>{"air", "argon"});
  Diagnostics diag;
  EXPECT_EQ(apply_one_hot(enc, "helium", &diag), (std::vector<double>{0, 0}));
  ASSERT_EQ(diag.size(), 1u);
  EXPECT_NE(diag.warnings()[0].find("helium"), std::string::npos);
}

TEST(OneHot, SingletonVocabulary) {
  const OneHotEncoder enc(std::vector<std::string>{"air"});
  EXPECT_EQ(apply_one_hot(enc, "air"), (std::vector<double>{1}));
}

TEST(AssembleMatrix, SurrogateHasSixtyColumns) {
  SynthConfig cfg;
  const auto records = synthesize(cfg);
  const Preprocessor pre = fit_preprocessor(records, NormMethod::kZScore);
  EXPECT_EQ(pre.encoders[1].size(), 8u);
  EXPECT_EQ(pre.encoders[3].size(), 22u);
  const FeatureMatrix fm = assemble_matrix(records, pre, TargetKind::kOrdinalClass);
  ASSERT_EQ(fm.values.cols(), 60u);
  ASSERT_EQ(fm.columns.size(), 60u);
  EXPECT_EQ(fm.classes, label_records(records));

  // 8 numeric columns first, then one block per nominal predictor.
  std::array<int, kNumPredictors> per_source{};
  for (std::size_t c = 0; c < 60; ++c) {
    EXPECT_EQ(fm.columns[c].kind, c < 8 ? ColumnKind::kNumeric : ColumnKind::kOneHot);
    ++per_source[static_cast<std::size_t>(fm.columns[c].source)];
  }
  for (int count : per_source) EXPECT_GE(count, 1);

  // Each nominal block sums to one on every training row.
  for (std::size_t r = 0; r < fm.rows(); ++r) {
    std::array<double, kNumPredictors> sums{};
    for (std::size_t c = 8; c < 60; ++c) {
      sums[static_cast<std::size_t>(fm.columns[c].source)] += fm.values(r, c);
    }
    for (NominalField f : {NominalField::kPlasmaTreatmentType, NominalField::kGasType,
                           NominalField::kLiquidType, NominalField::kMicrobialStrain}) {
      ASSERT_EQ(sums[static_cast<std::size_t>(to_predictor(f))], 1.0);
    }
  }
}

TEST(AssembleMatrix, ZeroRecords) {
  const std::vector<RawRecord> train = {make_record(1.0), make_record(4.0)};
  const Preprocessor pre = fit_preprocessor(train, NormMethod::kMinMax);
  const FeatureMatrix fm =
      assemble_matrix(std::vector<RawRecord>{}, pre, TargetKind::kNumeric);
  EXPECT_EQ(fm.rows(), 0u);
  EXPECT_EQ(pre.num_columns(), 12u);
}

TEST(AssembleMatrix, NumericTargetIsRawReduction) {
  const std::vector<RawRecord> train = {make_record(1.0), make_record(4.0)};
  const Preprocessor pre = fit_preprocessor(train, NormMethod::kZScore);
  const FeatureMatrix fm = assemble_matrix(train, pre, TargetKind::kNumeric);
  EXPECT_EQ(fm.targets, (std::vector<double>{1.0, 4.0}));
  EXPECT_TRUE(fm.classes.empty());
}

TEST(AssembleMatrix, UnknownTokenWarnsWithRow) {
  const std::vector<RawRecord> train = {make_record(1.0), make_record(4.0)};
  const Preprocessor pre = fit_preprocessor(train, NormMethod::kZScore);
  RawRecord unseen = make_record();
  unseen.at(NominalField::kLiquidType) = "seawater";
  Diagnostics diag;
  const FeatureMatrix fm =
      assemble_matrix(std::vector<RawRecord>{unseen}, pre, TargetKind::kNone, &diag);
  ASSERT_EQ(diag.size(), 1u);
  EXPECT_NE(diag.warnings()[0].find("seawater"), std::string::npos);
  for (std::size_t c = 0; c < fm.values.cols(); ++c) {
    if (fm.columns[c].source == Predictor::kLiquidType) {
      EXPECT_EQ(fm.values(0, c), 0.0);
    }
  }
}

TEST(AssembleMatrix, Deterministic) {
  const auto a = testing::surrogate_matrix(4, 120, TargetKind::kNumeric);
  const auto b = testing::surrogate_matrix(4, 120, TargetKind::kNumeric);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.columns, b.columns);
}

TEST(FeatureMatrix, SubsetKeepsTargets) {
  const auto fm = testing::surrogate_matrix(2, 40, TargetKind::kOrdinalClass);
  const std::vector<std::size_t> rows = {3, 0, 7};
  const FeatureMatrix s = fm.subset(rows);
  ASSERT_EQ(s.rows(), 3u);
  EXPECT_EQ(s.classes[0], fm.classes[3]);
  EXPECT_EQ(s.values(2, 5), fm.values(7, 5));
}

TEST(Preprocessor, JsonRoundTrip) {
  SynthConfig cfg;
  cfg.rows = 80;
  const auto records = synthesize(cfg);
  for (NormMethod m : kMethods) {
    const Preprocessor pre = fit_preprocessor(records, m);
    const Preprocessor back = preprocessor_from_json(to_json(pre));
    EXPECT_EQ(assemble_matrix(records, back, TargetKind::kNone).values,
              assemble_matrix(records, pre, TargetKind::kNone).values);
  }
}

}  // namespace
}  // namespace palml
