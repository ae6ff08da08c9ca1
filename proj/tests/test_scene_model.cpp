#include <gtest/gtest.h>

#include <fstream>

#include "lanewrap/error.hpp"
#include "lanewrap/scene_io.hpp"
#include "support.hpp"

namespace lanewrap {
namespace {

using testing::fixture_path;
using testing::scratch_dir;

void expect_scenes_equal(const Scene& a, const Scene& b, double tol) {
  EXPECT_EQ(a.scene_id, b.scene_id);
  EXPECT_EQ(a.tv_id, b.tv_id);
  EXPECT_EQ(a.frame, b.frame);
  EXPECT_NEAR(a.dt, b.dt, tol);
  ASSERT_EQ(a.agents.size(), b.agents.size());
  for (std::size_t i = 0; i < a.agents.size(); ++i) {
    ASSERT_EQ(a.agents[i].states.size(), b.agents[i].states.size());
    for (std::size_t k = 0; k < a.agents[i].states.size(); ++k) {
      const auto& s = a.agents[i].states[k];
      const auto& r = b.agents[i].states[k];
      EXPECT_NEAR(s.t, r.t, tol);
      EXPECT_NEAR(s.x, r.x, tol);
      EXPECT_NEAR(s.y, r.y, tol);
      EXPECT_NEAR(s.heading, r.heading, tol);
      EXPECT_NEAR(s.speed, r.speed, tol);
      EXPECT_NEAR(s.yaw_rate, r.yaw_rate, tol);
      EXPECT_NEAR(s.accel, r.accel, tol);
    }
  }
  ASSERT_EQ(a.lanes.size(), b.lanes.size());
  for (std::size_t i = 0; i < a.lanes.size(); ++i) {
    EXPECT_EQ(a.lanes[i].id, b.lanes[i].id);
    EXPECT_EQ(a.lanes[i].successors, b.lanes[i].successors);
    EXPECT_EQ(a.lanes[i].predecessors, b.lanes[i].predecessors);
    EXPECT_NEAR(a.lanes[i].width, b.lanes[i].width, tol);
    ASSERT_EQ(a.lanes[i].centerline.size(), b.lanes[i].centerline.size());
    for (std::size_t k = 0; k < a.lanes[i].centerline.size(); ++k) {
      EXPECT_NEAR(a.lanes[i].centerline[k].x, b.lanes[i].centerline[k].x, tol);
      EXPECT_NEAR(a.lanes[i].centerline[k].y, b.lanes[i].centerline[k].y, tol);
      EXPECT_NEAR(a.lanes[i].centerline[k].theta_or_kappa, b.lanes[i].centerline[k].theta_or_kappa, tol);
    }
  }
  ASSERT_EQ(a.gt_future.has_value(), b.gt_future.has_value());
  if (a.gt_future) {
    ASSERT_EQ(a.gt_future->size(), b.gt_future->size());
    for (std::size_t k = 0; k < a.gt_future->size(); ++k) {
      EXPECT_NEAR((*a.gt_future)[k].x, (*b.gt_future)[k].x, tol);
      EXPECT_NEAR((*a.gt_future)[k].y, (*b.gt_future)[k].y, tol);
    }
  }
}

TEST(SceneModel, LoadsBundledFixture) {
  const Scene s = load_scene(fixture_path("straight_1.json"));
  EXPECT_EQ(s.lanes.size(), 1u);
  EXPECT_EQ(s.agents.size(), 2u);
  EXPECT_EQ(s.tv().states.size(), 21u);
  EXPECT_TRUE(validate_scene(s).empty());
}

TEST(SceneModel, FixtureRoundTripsThroughSave) {
  const auto dir = scratch_dir("fixture_roundtrip");
  const Scene s = load_scene(fixture_path("straight_1.json"));
  save_scene(s, dir / "copy.json");
  expect_scenes_equal(s, load_scene(dir / "copy.json"), 1e-9);
}

TEST(SceneModel, MissingTvIsValidationError) {
  const auto dir = scratch_dir("missing_tv");
  Scene s = testing::straight_scene();
  s.tv_id = "nobody";
  save_scene(s, dir / "bad.json");
  try {
    load_scene(dir / "bad.json");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("tv_id"), std::string::npos);
  }
}

TEST(SceneModel, EmptyLanesStillLoad) {
  const auto dir = scratch_dir("empty_lanes");
  Scene s = testing::straight_scene();
  s.lanes.clear();
  save_scene(s, dir / "s.json");
  const Scene back = load_scene(dir / "s.json");
  EXPECT_TRUE(back.lanes.empty());
  EXPECT_TRUE(back.gt_future.has_value());
}

TEST(SceneModel, MalformedJsonIsParseError) {
  const auto dir = scratch_dir("malformed");
  std::ofstream(dir / "x.json") << "{\"scene_id\": ";
  EXPECT_THROW(load_scene(dir / "x.json"), ParseError);
}

TEST(SceneModel, FrenetTagRecordedInFile) {
  const auto dir = scratch_dir("frenet_tag");
  Scene s = testing::straight_scene();
  s.frame.kind = FrameKind::kFrenet;
  s.frame.centerline_index = 3;
  save_scene(s, dir / "f.json");
  std::ifstream in(dir / "f.json");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_NE(text.find("\"frenet\""), std::string::npos);
  EXPECT_NE(text.find("centerline_index"), std::string::npos);
  const Scene back = load_scene(dir / "f.json");
  EXPECT_TRUE(back.frame.is_frenet());
  EXPECT_EQ(back.frame.centerline_index, 3);
}

TEST(SceneModel, UnwritablePathIsIoError) {
  EXPECT_THROW(save_scene(testing::straight_scene(), "/nonexistent_dir/for/sure/s.json"), IoError);
}

TEST(SceneModel, ValidFixtureHasNoViolations) {
  EXPECT_TRUE(validate_scene(testing::straight_scene()).empty());
  EXPECT_TRUE(validate_scene(testing::fork_scene()).empty());
}

TEST(SceneModel, DuplicatePointNamesLane) {
  Scene s = testing::straight_scene();
  s.lanes[0].centerline.insert(s.lanes[0].centerline.begin() + 5, s.lanes[0].centerline[5]);
  const auto v = validate_scene(s);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("lane_0"), std::string::npos);
}

TEST(SceneModel, DtJumpIsOneViolation) {
  Scene s = testing::straight_scene();
  auto& states = s.agents[1].states;
  for (std::size_t i = 0; i < 5; ++i) states[i].t -= 0.1;
  EXPECT_EQ(validate_scene(s).size(), 1u);
}

TEST(SceneModel, GtLengthChecked) {
  Scene s = testing::straight_scene();
  s.gt_future->pop_back();
  EXPECT_EQ(validate_scene(s).size(), 1u);
}

TEST(SceneModel, AsymmetricSuccessorIsViolation) {
  Scene s = testing::fork_scene();
  s.lanes[1].predecessors.clear();
  EXPECT_FALSE(validate_scene(s).empty());
}

TEST(SceneModel, RandomScenesRoundTrip) {
  const auto dir = scratch_dir("random_roundtrip");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1000.0, 1000.0);
  for (int n = 0; n < 20; ++n) {
    Scene s = testing::fork_scene(n % 2 == 0);
    for (auto& a : s.agents) {
      for (auto& st : a.states) {
        st.x += u(rng) * 1e-3;
        st.y = u(rng);
        st.yaw_rate = u(rng) * 1e-4;
        st.accel = u(rng) * 1e-3;
      }
    }
    for (auto& p : *s.gt_future) p.y += u(rng) * 1e-2;
    save_scene(s, dir / "r.json");
    expect_scenes_equal(s, load_scene(dir / "r.json"), 1e-9);
  }
}

}  // namespace
}  // namespace lanewrap
