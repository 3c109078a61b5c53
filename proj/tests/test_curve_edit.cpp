#include <gtest/gtest.h>

#include "tonal/curve_edit.h"
#include "tonal/error.h"

using namespace tonal;

namespace {

FeatureSequence sample() {
  FeatureSequence f;
  f.tension = {1.0, 2.0, 3.0, 4.0, 5.0};
  f.distance = {0.0, 1.0, 0.5, 1.5, 1.0};
  f.strain = {0.5, 0.6, 0.7, 0.8, 0.9};
  f.tonality = Tonality::from_index(4);
  return f;
}

CurveEdit make(Feature target, EditOp op, std::size_t s, std::size_t e) {
  CurveEdit c;
  c.target = target;
  c.op = op;
  c.start = s;
  c.end = e;
  return c;
}

}  // namespace

TEST(CurveEdit, ScaleAndOffset) {
  auto scale = make(Feature::kTension, EditOp::kScale, 1, 2);
  scale.value = 2.0;
  auto offset = make(Feature::kStrain, EditOp::kOffset, 0, 4);
  offset.value = 0.1;
  const std::vector<CurveEdit> edits = {scale, offset};
  const auto out = edit_curve(sample(), edits);
  EXPECT_EQ(out.tension, (std::vector<double>{1.0, 4.0, 6.0, 4.0, 5.0}));
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(out.strain[i], sample().strain[i] + 0.1, 1e-15);
  EXPECT_EQ(out.distance, sample().distance);
  EXPECT_EQ(out.tonality, sample().tonality);
}

TEST(CurveEdit, SetRange) {
  auto e = make(Feature::kTension, EditOp::kSetRange, 0, 4);
  e.lo = 10.0;
  e.hi = 20.0;
  const auto out = edit_curve(sample(), std::span(&e, 1));
  EXPECT_EQ(out.tension, (std::vector<double>{10.0, 12.5, 15.0, 17.5, 20.0}));
  auto flat = make(Feature::kStrain, EditOp::kSetRange, 2, 2);
  flat.lo = 1.0;
  flat.hi = 2.0;
  EXPECT_EQ(edit_curve(sample(), std::span(&flat, 1)).strain[2], 1.5);
}

TEST(CurveEdit, SmoothIsMovingAverage) {
  auto e = make(Feature::kDistance, EditOp::kSmooth, 1, 3);
  e.window = 3;
  const auto out = edit_curve(sample(), std::span(&e, 1));
  const auto& d = sample().distance;
  EXPECT_NEAR(out.distance[1], (d[0] + d[1] + d[2]) / 3.0, 1e-15);
  EXPECT_NEAR(out.distance[2], (d[1] + d[2] + d[3]) / 3.0, 1e-15);
  EXPECT_NEAR(out.distance[3], (d[2] + d[3] + d[4]) / 3.0, 1e-15);
  EXPECT_EQ(out.distance[4], d[4]);
  e.window = 1;
  EXPECT_EQ(edit_curve(sample(), std::span(&e, 1)), sample());
  e.window = 2;
  EXPECT_THROW(edit_curve(sample(), std::span(&e, 1)), InputError);
}

TEST(CurveEdit, ClampingKeepsInvariants) {
  auto down = make(Feature::kTension, EditOp::kOffset, 0, 4);
  down.value = -3.0;
  auto dist = make(Feature::kDistance, EditOp::kSetPoint, 0, 1);
  dist.value = 2.0;
  const std::vector<CurveEdit> edits = {down, dist};
  const auto out = edit_curve(sample(), edits);
  EXPECT_EQ(out.tension, (std::vector<double>{0.0, 0.0, 0.0, 1.0, 2.0}));
  EXPECT_EQ(out.distance[0], 0.0);
  EXPECT_EQ(out.distance[1], 2.0);
  EXPECT_NO_THROW(out.validate());

  auto z = sample();
  z.normalized = true;
  z.norm_stats = NormStats{};
  EXPECT_EQ(edit_curve(z, std::span(&down, 1)).tension[0], -2.0);
}

TEST(CurveEdit, SegmentBounds) {
  auto e = make(Feature::kTension, EditOp::kScale, 3, 5);
  EXPECT_THROW(edit_curve(sample(), std::span(&e, 1)), InputError);
  e.start = 4;
  e.end = 3;
  EXPECT_THROW(edit_curve(sample(), std::span(&e, 1)), InputError);
}

TEST(CurveEdit, JsonForms) {
  const auto one = curve_edits_from_json(
      parse_json(R"({"target": "strain", "op": "set_range", "segment": [1, 3], "lo": 0.2, "hi": 0.9})"));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].target, Feature::kStrain);
  EXPECT_EQ(one[0].op, EditOp::kSetRange);
  EXPECT_EQ(one[0].start, 1u);
  EXPECT_EQ(one[0].end, 3u);
  EXPECT_EQ(one[0].hi, 0.9);
  const auto many = curve_edits_from_json(parse_json(R"([
    {"target": "tension", "op": "scale", "segment": [0, 0], "value": 2},
    {"target": "distance", "op": "smooth", "segment": [0, 4], "window": 5}])"));
  ASSERT_EQ(many.size(), 2u);
  EXPECT_EQ(many[1].window, 5);
  for (const auto& e : many) {
    const auto back = curve_edit_from_json(to_json(e));
    EXPECT_EQ(back.op, e.op);
    EXPECT_EQ(back.start, e.start);
    EXPECT_EQ(back.value, e.value);
  }
  EXPECT_THROW(curve_edits_from_json(parse_json(R"({"target": "loudness", "op": "scale", "segment": [0, 0]})")),
               InputError);
  EXPECT_THROW(curve_edits_from_json(parse_json(R"({"target": "tension", "op": "warp", "segment": [0, 0]})")),
               InputError);
  EXPECT_THROW(curve_edits_from_json(parse_json(R"({"target": "tension", "op": "scale", "segment": [0]})")),
               InputError);
}
