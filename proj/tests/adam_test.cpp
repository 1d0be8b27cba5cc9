#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "ned/adam.hpp"

namespace {

using ned::Tensor;

void set_grad(Tensor& t, const std::vector<double>& g) {
  auto buf = t.mutable_grad();
  for (std::size_t i = 0; i < g.size(); ++i) buf[i] = g[i];
}

TEST(Adam, FirstStepMovesBySignTimesStep) {
  Tensor p = Tensor::vector({1.0, -2.0, 0.5}, true);
  set_grad(p, {0.3, -7.0, 1e-3});
  ned::AdamState s;
  ned::adam_update(p, s);
  EXPECT_NEAR(p[0], 1.0 - 1e-4, 1e-9);
  EXPECT_NEAR(p[1], -2.0 + 1e-4, 1e-9);
  EXPECT_NEAR(p[2], 0.5 - 1e-4, 1e-8);
  EXPECT_EQ(s.step, 1u);
}

TEST(Adam, ZeroGradientLeavesParamsBitIdenticalAndDecaysMoments) {
  Tensor p = Tensor::vector({0.123456789, -9.87654321}, true);
  ned::AdamState s;
  set_grad(p, {1.0, -1.0});
  ned::adam_update(p, s);
  const std::vector<double> before(p.values().begin(), p.values().end());
  const std::vector<double> m_before = s.first_moment, v_before = s.second_moment;
  set_grad(p, {0.0, 0.0});
  ned::adam_update(p, s);
  EXPECT_EQ(std::memcmp(before.data(), p.values().data(), sizeof(double) * 2), 0);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(s.first_moment[i], 0.9 * m_before[i]);
    EXPECT_EQ(s.second_moment[i], 0.999 * v_before[i]);
  }
  EXPECT_EQ(s.step, 2u);
}

TEST(Adam, ZeroGradientOnFreshStateIsNoOp) {
  Tensor p = Tensor::vector({3.0}, true);
  ned::AdamState s;
  ned::adam_update(p, s);
  EXPECT_EQ(p[0], 3.0);
  EXPECT_EQ(s.first_moment[0], 0.0);
}

TEST(Adam, TwoStepsMatchHandRecurrence) {
  Tensor p = Tensor::scalar(0.0, true);
  ned::AdamState s;
  for (int i = 0; i < 2; ++i) {
    set_grad(p, {1.0});
    ned::adam_update(p, s);
  }
  // Hand evaluation with g = 1:
  //   m1 = 0.1, v1 = 0.001, mhat1 = 1, vhat1 = 1 -> x1 = -a / (1 + eps)
  //   m2 = 0.19, v2 = 0.001999, mhat2 = 0.19 / 0.19 = 1, vhat2 = 0.001999 / 0.001999 = 1
  const double a = 1e-4, eps = 1e-8;
  const double x1 = -a * 1.0 / (1.0 + eps);
  const double m2 = 0.9 * 0.1 + 0.1, v2 = 0.999 * 0.001 + 0.001;
  const double x2 = x1 - a * (m2 / (1 - 0.81)) / (std::sqrt(v2 / (1 - 0.998001)) + eps);
  EXPECT_NEAR(p[0], x2, 1e-15);
  EXPECT_NEAR(p[0], -2e-4, 1e-11);
}

TEST(Adam, MissingGradientIsContractError) {
  Tensor p = Tensor::vector({1.0});
  ned::AdamState s;
  EXPECT_THROW(ned::adam_update(p, s), ned::ContractError);
}

TEST(Adam, StepCountIncrementsByOne) {
  Tensor p = Tensor::vector({1.0, 2.0}, true);
  ned::AdamState s;
  EXPECT_EQ(s.step, 0u);
  for (unsigned k = 1; k <= 5; ++k) {
    set_grad(p, {0.5, -0.5});
    ned::adam_update(p, s);
    EXPECT_EQ(s.step, k);
  }
}

}  // namespace
