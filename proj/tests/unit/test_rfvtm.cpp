#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "vtmatch/descriptor.hpp"
#include "vtmatch/error.hpp"
#include "vtmatch/evaluation.hpp"
#include "vtmatch/filter.hpp"
#include "vtmatch/synthgen.hpp"

using namespace vtmatch;

namespace {

SceneConfig config(std::size_t inliers, std::size_t outliers,
                   std::uint64_t seed, double noise = 0.0) {
  SceneConfig c;
  c.n_inliers = inliers;
  c.outlier_ratio = static_cast<double>(outliers) /
                    static_cast<double>(inliers + outliers);
  c.noise_sigma = noise;
  c.seed = seed;
  return c;
}

CorrespondenceSet by_ids(const CorrespondenceSet& all,
                         const std::vector<std::int64_t>& ids) {
  std::vector<std::size_t> pos;
  for (std::int64_t id : ids)
    pos.push_back(static_cast<std::size_t>(
        std::find(all.ids.begin(), all.ids.end(), id) - all.ids.begin()));
  return all.subset(pos);
}

}  // namespace

TEST(Rfvtm, CleanSceneOneIteration) {
  const Scene s = generate_scene(config(40, 0, 1));
  const FilterResult r = rfvtm(s.correspondences);
  EXPECT_EQ(r.residual, s.correspondences);
  EXPECT_TRUE(r.deleted.empty());
  EXPECT_EQ(r.termination, Termination::kThresholdReached);
  ASSERT_TRUE(r.rms_error.has_value());
  EXPECT_LT(*r.rms_error, 1e-9);
  for (const TraceRecord& t : r.trace) EXPECT_EQ(t.outer_iteration, 0);
}

TEST(Rfvtm, FinalResidualIsConsistentAndPartitions) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Scene s = generate_scene(config(40, 40, seed, 0.5));
    const FilterResult r = rfvtm(s.correspondences);
    std::vector<std::int64_t> all = r.residual.ids;
    all.insert(all.end(), r.deleted.ids.begin(), r.deleted.ids.end());
    std::sort(all.begin(), all.end());
    std::vector<std::int64_t> want = s.correspondences.ids;
    std::sort(want.begin(), want.end());
    EXPECT_EQ(all, want);
    const auto st = TrichotomyState::build(
        r.residual, {.eps = default_orientation_eps(s.correspondences)});
    EXPECT_TRUE(st.disparity_is_zero());
    for (std::int64_t id : r.recovered.ids)
      EXPECT_TRUE(std::count(r.residual.ids.begin(), r.residual.ids.end(), id));
  }
}

TEST(Rfvtm, RecoveriesSatisfiedBothCriteria) {
  // Replay every recovery step: the recovered ids must be exactly the
  // candidates passing both criteria against the residual at that instant.
  const Scene s = generate_scene(config(50, 50, 3, 0.5));
  const CorrespondenceSet& c = s.correspondences;
  const double eps = default_orientation_eps(c);
  const FilterResult r = rfvtm(c);
  std::set<std::int64_t> residual(c.ids.begin(), c.ids.end());
  std::vector<std::int64_t> pool;
  std::size_t last_recovery = 0;
  for (std::size_t i = 0; i < r.trace.size(); ++i)
    if (r.trace[i].note == "recovery") last_recovery = i;
  const bool last_discarded = r.termination == Termination::kStalled ||
                              r.termination == Termination::kIterationCap;
  int recovery_steps = 0;
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const TraceRecord& t = r.trace[i];
    for (std::int64_t id : t.removed_ids) {
      residual.erase(id);
      pool.push_back(id);
    }
    if (t.note != "recovery") continue;
    ++recovery_steps;
    const CorrespondenceSet res =
        by_ids(c, std::vector<std::int64_t>(residual.begin(), residual.end()));
    const AffineTransform theta = estimate_affine_lsm(res);
    const auto want =
        recover_candidates(res, by_ids(c, pool), theta, eps, r.reflected);
    EXPECT_EQ(t.recovered_ids, want);
    if (i == last_recovery && last_discarded) continue;
    for (std::int64_t id : t.recovered_ids) {
      residual.insert(id);
      pool.erase(std::find(pool.begin(), pool.end(), id));
    }
  }
  EXPECT_EQ(std::vector<std::int64_t>(residual.begin(), residual.end()),
            [&] {
              std::vector<std::int64_t> ids = r.residual.ids;
              std::sort(ids.begin(), ids.end());
              return ids;
            }());
  EXPECT_GE(recovery_steps, 1);
}

TEST(Rfvtm, RecallDominatesVtm) {
  double rec_vtm = 0, rec_rf = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Scene s = generate_scene(config(40, 40, seed, 0.5));
    const ConfusionCounts a = classify(vtm(s.correspondences), s.truth);
    const ConfusionCounts b = classify(rfvtm(s.correspondences), s.truth);
    rec_vtm += *metrics(a).rec;
    rec_rf += *metrics(b).rec;
  }
  EXPECT_GE(rec_rf, rec_vtm);
}

TEST(Rfvtm, RotatedScaledSceneKeepsAllInliers) {
  // 30 inliers and 19 outliers under rotation 120 and scale 2.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SceneConfig cfg = config(30, 19, seed);
    cfg.rotation_deg = 120;
    cfg.scale = 2.0;
    const Scene s = generate_scene(cfg);
    const ConfusionCounts c = classify(rfvtm(s.correspondences), s.truth);
    EXPECT_EQ(c.rc, 30u);
    EXPECT_EQ(c.rf, 0u);
  }
}

TEST(Rfvtm, SubdivisionLossIsRepaired) {
  double rc = 0, rf = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Scene s = generate_scene(config(42, 69, seed));
    for (std::size_t m : {5u, 10u}) {
      RfvtmConfig cfg;
      cfg.m = m;
      cfg.seed = seed;
      const ConfusionCounts c = classify(rfvtm(s.correspondences, cfg), s.truth);
      rc += static_cast<double>(c.rc);
      rf += static_cast<double>(c.rf);
    }
  }
  EXPECT_GE(rc / 20, 41.0);
  EXPECT_LE(rf / 20, 0.5);
}

TEST(Rfvtm, Terminates) {
  RfvtmConfig cfg;
  cfg.max_outer_iterations = 1;
  const Scene s = generate_scene(config(50, 50, 4, 0.5));
  const FilterResult r = rfvtm(s.correspondences, cfg);
  for (const TraceRecord& t : r.trace) EXPECT_EQ(t.outer_iteration, 0);
  EXPECT_NE(r.termination, Termination::kConsistent);
}

TEST(Rfvtm, ConfigValidation) {
  RfvtmConfig cfg;
  cfg.th_err = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.max_outer_iterations = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.m = 0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Recover, ZeroErrorInlierReturns) {
  const Scene s = generate_scene(config(20, 0, 5));
  const CorrespondenceSet& c = s.correspondences;
  std::vector<std::size_t> keep, drop = {7};
  for (std::size_t k = 0; k < c.size(); ++k)
    if (k != 7) keep.push_back(k);
  const auto got = recover_candidates(c.subset(keep), c.subset(drop),
                                      s.truth.transform,
                                      default_orientation_eps(c));
  EXPECT_EQ(got, (std::vector<std::int64_t>{c.ids[7]}));
}

TEST(Recover, GrossOutlierRejected) {
  const Scene s = generate_scene(config(20, 0, 6, 0.3));
  const CorrespondenceSet& c = s.correspondences;
  CorrespondenceSet deleted;
  const Point2 p{100, 100};
  Point2 q = apply_affine(s.truth.transform, p);
  q.x += 50;
  deleted.push_back(p, q, 99);
  const AffineTransform theta = estimate_affine_lsm(c);
  EXPECT_TRUE(recover_candidates(c, deleted, theta,
                                 default_orientation_eps(c)).empty());
}

TEST(Recover, StubbornOutlierFailsOnlyTheErrorBound) {
  // A small displacement that crosses no residual line keeps the
  // descriptors identical but exceeds the residual's largest error.
  const Scene s = generate_scene(config(12, 0, 7));
  const CorrespondenceSet& c = s.correspondences;
  const double eps = default_orientation_eps(c);
  const AffineTransform& t = s.truth.transform;
  CorrespondenceSet residual = c;
  residual.sensed[0].x += 0.2;  // makes E_max positive
  const Point2 p{200.5, 300.25};
  Point2 q = apply_affine(t, p);
  q.x += 0.5;
  ASSERT_TRUE(candidate_consistent(residual, p, q, eps));
  const AffineTransform theta = estimate_affine_lsm(residual);
  double emax = 0;
  for (std::size_t k = 0; k < residual.size(); ++k)
    emax = std::max(emax,
                    individual_error(residual.reference[k], residual.sensed[k], theta));
  ASSERT_GT(individual_error(p, q, theta), emax);
  CorrespondenceSet deleted;
  deleted.push_back(p, q, 50);
  EXPECT_TRUE(recover_candidates(residual, deleted, theta, eps).empty());
}

TEST(Recover, DegenerateResidual) {
  CorrespondenceSet residual;
  residual.push_back({0, 0}, {0, 0}, 0);
  residual.push_back({1, 1}, {1, 1}, 1);
  try {
    recover_candidates(residual, {}, {}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateResidual);
  }
}
