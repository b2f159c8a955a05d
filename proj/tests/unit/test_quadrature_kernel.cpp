#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "selr/error.hpp"
#include "selr/kernel.hpp"
#include "selr/quadrature.hpp"

namespace {

using selr::Kernel;
using selr::KernelFamily;

const std::vector<KernelFamily> kFamilies = {KernelFamily::Uniform, KernelFamily::Epanechnikov,
                                             KernelFamily::Biweight, KernelFamily::Triweight};

// Midpoint rule with many panels, used as an independent oracle.
template <class F>
double midpoint(F&& f, double a, double b, int panels) {
  const double step = (b - a) / panels;
  double sum = 0.0;
  for (int k = 0; k < panels; ++k) sum += f(a + (k + 0.5) * step);
  return sum * step;
}

double kstar_oracle(const Kernel& k, double s, double mu2) {
  return midpoint([&](double t) { return k(t) * k(s + t) * (1.0 + t * (s + t) / mu2); }, -1.0,
                  1.0, 100000);
}

TEST(Quadrature, PolynomialIsExact) {
  const auto r = selr::integrate([](double x) { return 5 * x * x * x * x - 3 * x + 1; }, -1.0, 2.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 33.0 - 4.5 + 3.0, 1e-12);
}

TEST(Quadrature, SmoothTranscendental) {
  const auto r = selr::integrate([](double x) { return std::exp(-x * x); }, -3.0, 3.0);
  EXPECT_NEAR(r.value, std::sqrt(std::numbers::pi) * std::erf(3.0), 1e-12);
}

TEST(Quadrature, KinkNeedsSubdivision) {
  const auto r = selr::integrate([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, 1e-12);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 0.5 * 0.09 + 0.5 * 0.49, 1e-10);
  EXPECT_GT(r.evaluations, 15);
}

TEST(Quadrature, FallbackWhenBudgetExhausted) {
  const auto r = selr::integrate([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0,
                                 1e-14, 0.0, 3, 2048);
  EXPECT_FALSE(r.converged);
  EXPECT_TRUE(std::isfinite(r.value));
}

TEST(KernelEval, KnownValues) {
  EXPECT_DOUBLE_EQ(Kernel(KernelFamily::Epanechnikov)(0.0), 0.75);
  EXPECT_DOUBLE_EQ(Kernel(KernelFamily::Triweight)(0.0), 35.0 / 32.0);
  EXPECT_DOUBLE_EQ(Kernel(KernelFamily::Biweight)(0.0), 15.0 / 16.0);
  EXPECT_DOUBLE_EQ(Kernel(KernelFamily::Uniform)(0.3), 0.5);
  for (auto f : kFamilies) {
    EXPECT_EQ(selr::kernel_eval(Kernel(f), 1.5), 0.0);
    EXPECT_EQ(selr::kernel_eval(Kernel(f), -1.0001), 0.0);
  }
}

TEST(KernelEval, DensityInvariants) {
  for (auto f : kFamilies) {
    const Kernel k(f);
    const auto mass = selr::integrate([&](double t) { return k(t); }, -1.0, 1.0);
    EXPECT_NEAR(mass.value, 1.0, 1e-10) << k.name();
    for (double t = -1.2; t <= 1.2; t += 0.05) {
      EXPECT_GE(k(t), 0.0);
      EXPECT_DOUBLE_EQ(k(t), k(-t));
    }
  }
}

TEST(KernelMoments, SecondMoment) {
  EXPECT_NEAR(selr::second_moment(Kernel(KernelFamily::Uniform)), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(selr::second_moment(Kernel(KernelFamily::Epanechnikov)), 0.2, 1e-12);
  EXPECT_NEAR(selr::second_moment(Kernel(KernelFamily::Biweight)), 1.0 / 7.0, 1e-12);
  EXPECT_NEAR(selr::second_moment(Kernel(KernelFamily::Triweight)), 1.0 / 9.0, 1e-12);
}

TEST(KStar, ClosedFormsAtZero) {
  EXPECT_NEAR(selr::kstar(Kernel(KernelFamily::Uniform), 0.0), 1.0, 1e-12);
  EXPECT_NEAR(selr::kstar(Kernel(KernelFamily::Epanechnikov), 0.0), 36.0 / 35.0, 1e-12);
  for (auto f : kFamilies) EXPECT_EQ(selr::kstar(Kernel(f), 2.5), 0.0);
}

TEST(KStar, UniformClosedForm) {
  const Kernel k(KernelFamily::Uniform);
  for (double s = 0.0; s <= 2.0; s += 0.125) {
    EXPECT_NEAR(selr::kstar(k, s), 1.0 - s + s * s * s / 8.0, 1e-12) << s;
  }
}

TEST(KStar, SymmetricOnGrid) {
  for (auto f : kFamilies) {
    const Kernel k(f);
    for (int j = 0; j <= 40; ++j) {
      const double s = -2.0 + 0.1 * j;
      EXPECT_NEAR(selr::kstar(k, s), selr::kstar(k, -s), 1e-9);
    }
  }
}

TEST(KStar, BoundedByValueAtZero) {
  for (auto f : {KernelFamily::Uniform, KernelFamily::Epanechnikov}) {
    const Kernel k(f);
    const double k0 = selr::kstar(k, 0.0);
    for (int j = 0; j <= 40; ++j) {
      EXPECT_LE(std::abs(selr::kstar(k, -2.0 + 0.1 * j)), k0 + 1e-12);
    }
  }
}

TEST(KStar, MatchesMidpointOracle) {
  for (auto f : kFamilies) {
    const Kernel k(f);
    const double mu2 = selr::second_moment(k);
    for (double s : {0.0, 0.37, 0.9, 1.3, 1.85}) {
      EXPECT_NEAR(selr::kstar(k, s), kstar_oracle(k, s, mu2), 1e-6) << k.name() << " s=" << s;
    }
  }
}

TEST(KernelConstants, UniformExact) {
  const auto c = selr::kernel_constants(Kernel(KernelFamily::Uniform));
  EXPECT_NEAR(c.kstar0, 1.0, 1e-10);
  EXPECT_NEAR(c.kstar_l2, 148.0 / 210.0, 1e-10);
  EXPECT_NEAR(c.r_K, 2.0 * 210.0 / 148.0, 1e-9);
  EXPECT_NEAR(c.c_K, 210.0 / 148.0, 1e-9);
}

TEST(KernelConstants, EpanechnikovMatchesOracle) {
  const Kernel k(KernelFamily::Epanechnikov);
  const auto c = selr::kernel_constants(k);
  const double l2 = midpoint(
      [&](double s) {
        const double v = kstar_oracle(k, s, 0.2);
        return v * v;
      },
      -2.0, 2.0, 400);
  EXPECT_NEAR(c.kstar_l2, l2, 1e-5);
  EXPECT_NEAR(c.r_K, 2.4797688, 1e-6);
  EXPECT_NEAR(c.c_K, 1.2753097, 1e-6);
}

TEST(KernelConstants, TriweightValues) {
  const auto c = selr::kernel_constants(Kernel(KernelFamily::Triweight));
  EXPECT_NEAR(c.mu2, 1.0 / 9.0, 1e-12);
  EXPECT_NEAR(c.kstar0, 1.3053613, 1e-6);
  EXPECT_NEAR(c.r_K, 2.46222, 1e-4);
  EXPECT_NEAR(c.c_K, 1.60705, 1e-4);
}

TEST(KernelConstants, IdentitiesHold) {
  for (auto f : kFamilies) {
    const auto c = selr::kernel_constants(Kernel(f));
    EXPECT_GT(c.mu2, 0.0);
    EXPECT_GT(c.kstar_l2, 0.0);
    EXPECT_NEAR(c.c_K, c.r_K * c.kstar0 / 2.0, 1e-12 * c.c_K);
    EXPECT_DOUBLE_EQ(c.r_K, 2.0 * c.kstar0 / c.kstar_l2);
  }
}

TEST(KernelConstants, FastEnough) {
  const auto start = std::chrono::steady_clock::now();
  const auto c = selr::kernel_constants(Kernel(KernelFamily::Biweight));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_GT(c.r_K, 0.0);
  EXPECT_LT(secs, 1.0);
}

TEST(KernelParse, NamesAndErrors) {
  EXPECT_EQ(selr::parse_kernel("epanechnikov").family(), KernelFamily::Epanechnikov);
  EXPECT_EQ(selr::parse_kernel("quartic").family(), KernelFamily::Biweight);
  EXPECT_EQ(selr::parse_kernel("triweight").family(), KernelFamily::Triweight);
  EXPECT_THROW(selr::parse_kernel("gaussian"), selr::Error);
}

TEST(KernelTabulated, ReproducesEpanechnikov) {
  const int m = 401;
  std::vector<double> t(m), v(m);
  for (int i = 0; i < m; ++i) {
    t[i] = -1.0 + 2.0 * i / (m - 1);
    v[i] = 1.0 - t[i] * t[i];
  }
  const Kernel k = Kernel::tabulated(t, v);
  EXPECT_NEAR(k(0.0), 0.75, 1e-5);
  EXPECT_NEAR(k(0.5), 0.75 * 0.75, 1e-5);
  const auto c = selr::kernel_constants(k);
  const auto ref = selr::kernel_constants(Kernel(KernelFamily::Epanechnikov));
  EXPECT_NEAR(c.r_K, ref.r_K, 1e-4);
  EXPECT_NEAR(c.c_K, ref.c_K, 1e-4);
}

TEST(KernelTabulated, RejectsInvalidTables) {
  std::vector<double> t = {-1.0, 0.0, 1.0};
  EXPECT_THROW(Kernel::tabulated(t, std::vector<double>{0.0, 1.0, 0.5}), selr::Error);
  EXPECT_THROW(Kernel::tabulated(t, std::vector<double>{0.0, -1.0, 0.0}), selr::Error);
  EXPECT_THROW(Kernel::tabulated(std::vector<double>{-1.0, 0.2, 1.0},
                                 std::vector<double>{0.0, 1.0, 0.0}),
               selr::Error);
}

TEST(KernelTabulated, LoadsFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "selr_kernel_table.txt";
  {
    std::ofstream out(path);
    out << "# t K\n";
    for (int i = 0; i <= 200; ++i) {
      const double t = -1.0 + i / 100.0;
      out << t << "," << (1.0 - t * t) * (1.0 - t * t) << "\n";
    }
  }
  const Kernel k = selr::parse_kernel("tabulated:" + path.string());
  EXPECT_EQ(k.family(), KernelFamily::Tabulated);
  EXPECT_NEAR(k(0.0), 15.0 / 16.0, 1e-3);
  std::filesystem::remove(path);
}

}  // namespace
