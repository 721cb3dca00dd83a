#include <gtest/gtest.h>

#include <cmath>

#include "regime_sde/errors.hpp"
#include "regime_sde/normal.hpp"

using namespace rsde;

namespace {

// Reference values computed once with mpmath at 50 digits.
struct Ref {
    double x;
    long double phi;
};
constexpr Ref kRefs[] = {
    {-38.0, 2.88542836006878430835e-316L}, {-10.0, 7.619853024160526066e-24L},
    {-5.0, 2.866515718791939117e-7L},      {-1.5, 0.066807201268858066L},
    {-0.5, 0.30853753872598690L},          {0.3, 0.61791142218895264L},
    {1.0, 0.84134474606854295L},           {2.5, 0.99379033467422386L},
    {6.0, 0.99999999901341235L},           {8.5, 0.99999999999999999052L},
};

}  // namespace

TEST(Normal, CdfMatchesHighPrecisionReference) {
    for (const auto& r : kRefs) {
        const double got = std_normal_cdf(r.x);
        EXPECT_LE(std::abs(static_cast<long double>(got) - r.phi), 1e-14L) << "x=" << r.x;
        if (r.x < 0) EXPECT_NEAR(got / static_cast<double>(r.phi), 1.0, 1e-13) << "x=" << r.x;
    }
}

TEST(Normal, CdfAgainstLongDoubleErfc) {
    for (double x = -9.0; x <= 9.0; x += 0.0137) {
        const long double ref = 0.5L * std::erfc(-static_cast<long double>(x) / std::sqrt(2.0L));
        EXPECT_LE(std::abs(std_normal_cdf(x) - ref), 1e-14L) << x;
    }
}

TEST(Normal, SpecialPoints) {
    EXPECT_EQ(std_normal_cdf(0.0), 0.5);
    EXPECT_EQ(std_normal_quantile(0.5), 0.0);
    EXPECT_NEAR(std_normal_cdf(1.959963985), 0.975, 1e-9);
    EXPECT_NEAR(std_normal_pdf(0.0), 0.3989422804014327, 1e-16);
}

TEST(Normal, QuantileInvertsCdf) {
    for (double p = 1e-300; p < 1e-3; p *= 7.3) {
        const double x = std_normal_quantile(p);
        EXPECT_NEAR(std_normal_cdf(x) / p, 1.0, 1e-12) << p;
    }
    for (double p = 0.0005; p < 1.0; p += 0.00731) {
        EXPECT_LE(std::abs(std_normal_cdf(std_normal_quantile(p)) - p), 1e-12) << p;
    }
    EXPECT_NEAR(std_normal_quantile(0.975), 1.959963984540054, 1e-13);
}

TEST(Normal, QuantileRejectsOutOfRange) {
    EXPECT_THROW(std_normal_quantile(0.0), RangeError);
    EXPECT_THROW(std_normal_quantile(1.0), RangeError);
    EXPECT_THROW(std_normal_quantile(-0.1), RangeError);
    EXPECT_THROW(std_normal_quantile(std::nan("")), RangeError);
}
