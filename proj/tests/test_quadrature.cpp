#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "inlapf/kalman.hpp"
#include "inlapf/model.hpp"
#include "inlapf/quadrature.hpp"

using namespace inlapf;

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
    for (std::size_t n : {2, 5, 12}) {
        const GaussLegendre gl(n);
        REQUIRE(gl.nodes.size() == n);
        // moments of x^k over [-1,1]: 0 for odd k, 2/(k+1) for even k
        for (std::size_t k = 0; k <= 2 * n - 1; ++k) {
            double got = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                got += gl.weights[i] * std::pow(gl.nodes[i], static_cast<double>(k));
            const double expected = (k % 2 == 0) ? 2.0 / static_cast<double>(k + 1) : 0.0;
            CHECK(got == doctest::Approx(expected).epsilon(1e-12));
        }
        // weights sum to the interval length and nodes are symmetric
        double wsum = 0.0;
        for (double w : gl.weights) wsum += w;
        CHECK(wsum == doctest::Approx(2.0).epsilon(1e-13));
        for (std::size_t i = 0; i < n; ++i)
            CHECK(gl.nodes[i] == doctest::Approx(-gl.nodes[n - 1 - i]).epsilon(1e-12));
    }
}

TEST_CASE("scaled rule integrates over arbitrary intervals") {
    const GaussLegendre gl(8);
    const auto s = gl.scaled(1.0, 3.0);
    // integral of x^3 over [1,3] = (81-1)/4 = 20
    double got = 0.0;
    for (std::size_t i = 0; i < s.nodes.size(); ++i)
        got += s.weights[i] * s.nodes[i] * s.nodes[i] * s.nodes[i];
    CHECK(got == doctest::Approx(20.0).epsilon(1e-12));
    // Gaussian mass over a wide scaled window
    const auto wide = GaussLegendre(64).scaled(-9.0, 9.0);
    double mass = 0.0;
    for (std::size_t i = 0; i < wide.nodes.size(); ++i)
        mass += wide.weights[i] * std::exp(normal_logpdf(wide.nodes[i], 0.0, 1.0));
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("chain quadrature reproduces the exact linear-Gaussian marginal") {
    const LinearGaussianSsm model(0.5);
    const HyperParams theta{0.6, 0.7, 0.3};
    for (std::size_t T : {1, 2, 3, 4}) {
        const Dataset data = simulate(model, T, theta, 2718 + T);
        const ChainQuadrature quad(model, data, theta);
        CHECK(quad.log_marginal_lik() ==
              doctest::Approx(kalman_loglik(data, theta, 0.5)).epsilon(1e-9));
    }
}

TEST_CASE("chain quadrature marginals integrate back to the joint") {
    const PoissonSsm model;
    const HyperParams theta{0.7, 0.6, 1.0};
    const Dataset data = simulate(model, 3, theta, 99);
    const ChainQuadrature quad(model, data, theta);

    // For each coordinate, integrating exp(log_joint_marginal) over a wide
    // grid recovers p(y|theta) again.
    const GaussLegendre gl(96);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto s = gl.scaled(-6.0, 6.0);
        double total = 0.0;
        for (std::size_t k = 0; k < s.nodes.size(); ++k)
            total += s.weights[k] *
                     std::exp(quad.log_joint_marginal(i, s.nodes[k]) - quad.log_marginal_lik());
        CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    }
    CHECK_THROWS_AS(quad.log_joint_marginal(3, 0.0), IndexOutOfRange);
}

TEST_CASE("chain quadrature rejects long chains") {
    const PoissonSsm model;
    const HyperParams theta{0.5, 0.5, 0.0};
    const Dataset data = simulate(model, 5, theta, 1);
    CHECK_THROWS_AS(ChainQuadrature(model, data, theta), DimensionTooLarge);
}

TEST_CASE("posterior quadrature recovers a synthetic Gaussian posterior") {
    // Log-likelihood chosen so that loglik + log prior is (up to constants)
    // an independent Gaussian in z: subtract the prior and add the target.
    PriorSpec prior;
    prior.m_rho = 0.3;
    prior.s_rho = 0.8;
    prior.m_alpha = -0.2;
    prior.s_alpha = 1.5;
    prior.a = 2.0;
    prior.b = 1.0;
    const std::array<double, 3> target_mean{0.9, 0.4, -0.6};
    const std::array<double, 3> target_sd{0.5, 0.35, 0.7};
    const auto loglik = [&](const InternalParams& z) {
        double lp = 0.0;
        for (std::size_t j = 0; j < 3; ++j)
            lp += normal_logpdf(z[j], target_mean[j], target_sd[j]);
        return lp - log_prior_internal(z, prior);
    };
    const PosteriorQuadrature pq = posterior_quadrature(loglik, prior, 32, 8.0);
    for (std::size_t j = 0; j < 3; ++j)
        CHECK(pq.mean_internal[j] == doctest::Approx(target_mean[j]).epsilon(1e-6));

    // Natural-scale moments from independent 1-d quadrature oracles.
    const GaussLegendre gl(128);
    auto natural_moments = [&](std::size_t j, auto transform) {
        const auto s = gl.scaled(target_mean[j] - 10.0 * target_sd[j],
                                 target_mean[j] + 10.0 * target_sd[j]);
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t k = 0; k < s.nodes.size(); ++k) {
            const double w =
                s.weights[k] * std::exp(normal_logpdf(s.nodes[k], target_mean[j], target_sd[j]));
            const double v = transform(s.nodes[k]);
            m1 += w * v;
            m2 += w * v * v;
        }
        return std::pair<double, double>{m1, std::sqrt(m2 - m1 * m1)};
    };
    const auto [mr, sr] = natural_moments(0, [](double z) { return rhotilde_to_rho(z); });
    const auto [ms, ss] = natural_moments(1, [](double z) { return std::exp(-0.5 * z); });
    const auto [ma, sa] = natural_moments(2, [](double z) { return z; });
    CHECK(pq.mean_natural[0] == doctest::Approx(mr).epsilon(1e-6));
    CHECK(pq.mean_natural[1] == doctest::Approx(ms).epsilon(1e-6));
    CHECK(pq.mean_natural[2] == doctest::Approx(ma).epsilon(1e-6));
    CHECK(pq.sd_natural[0] == doctest::Approx(sr).epsilon(1e-5));
    CHECK(pq.sd_natural[1] == doctest::Approx(ss).epsilon(1e-5));
    CHECK(pq.sd_natural[2] == doctest::Approx(sa).epsilon(1e-5));
}
