#include <doctest.h>

#include <cmath>

#include "rislab/channel.hpp"
#include "rislab/numerics.hpp"

using namespace rislab;

namespace {

void check_hermitian_psd(const CMatrix& r) {
    CHECK((r - r.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(r);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
    for (int n = 0; n < r.rows(); ++n) CHECK(r(n, n).real() == doctest::Approx(1.0));
}

Scenario small_scenario() {
    Scenario s;
    s.num_elements = 4;
    s.num_due = 2;
    s.num_rue = 2;
    s.num_rbs = 2;
    return s;
}

}  // namespace

TEST_CASE("upa_shape picks the most square factorization") {
    CHECK(upa_shape(16) == std::pair<int, int>{4, 4});
    CHECK(upa_shape(20) == std::pair<int, int>{4, 5});
    CHECK(upa_shape(7) == std::pair<int, int>{1, 7});
    CHECK(upa_shape(100) == std::pair<int, int>{10, 10});
    CHECK(upa_shape(1) == std::pair<int, int>{1, 1});
}

TEST_CASE("upa_correlation reference entries") {
    const CMatrix one = upa_correlation(1, 0.05, 0.1);
    CHECK(one.rows() == 1);
    CHECK(one(0, 0).real() == 1.0);
    const CMatrix four = upa_correlation(4, 0.05, 0.1);
    // half-wavelength neighbours: sinc(1) = 0
    CHECK(std::abs(four(0, 1)) < 1e-15);
    CHECK(std::abs(four(0, 2)) < 1e-15);
    // diagonal neighbours at sqrt(2) spacing
    const double x = std::sqrt(2.0);
    CHECK(four(0, 3).real() == doctest::Approx(std::sin(kPi * x) / (kPi * x)));
    CHECK_THROWS_AS(upa_correlation(4, 0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(upa_correlation(4, 0.05, -0.1), std::invalid_argument);
}

TEST_CASE("upa_correlation is Hermitian PSD with unit diagonal") {
    for (int n : {2, 7, 16, 20, 64, 100}) check_hermitian_psd(upa_correlation(n, 0.05, 0.1));
    // denser than half-wavelength spacing is still PSD
    check_hermitian_psd(upa_correlation(36, 0.02, 0.1));
}

TEST_CASE("correlation_sqrt squares back") {
    const CMatrix r = upa_correlation(36, 0.03, 0.1);
    const CMatrix s = correlation_sqrt(r);
    CHECK((s * s - r).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((s - s.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pathloss_linear reference values") {
    CHECK(pathloss_linear(1.0, 2.2, -30.0) == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK(pathloss_linear(100.0, 2.2, -30.0) == doctest::Approx(3.981071705534973e-8).epsilon(1e-10));
    CHECK(pathloss_linear(50.0, 3.7, -30.0) == doctest::Approx(std::pow(10.0, -(3.0 + 3.7 * std::log10(50.0)))).epsilon(1e-12));
    CHECK(pathloss_linear(50.0, 3.7, -30.0) == doctest::Approx(5.24e-10).epsilon(2e-3));
    CHECK_THROWS_AS(pathloss_linear(0.5, 2.0, -30.0), std::domain_error);
}

TEST_CASE("sample_rician LoS-only limit") {
    const CVector los = upa_steering(9, 0.05, 0.1, 0.3, -0.2);
    const RicianParams p = RicianParams::uncorrelated(1e12, los, 2e-6);
    Stream rng(1);
    const CMatrix x = sample_rician(p, 9, 1, rng);
    CHECK((x - std::sqrt(2e-6) * los).norm() / (std::sqrt(2e-6) * los.norm()) < 1e-5);
}

TEST_CASE("sample_rician Rayleigh power") {
    const RicianParams p = RicianParams::rayleigh(1, 1);
    Stream rng(2);
    StatAccumulator acc;
    for (int i = 0; i < 100000; ++i) acc.add(std::norm(sample_rician(p, 1, 1, rng)(0, 0)));
    CHECK(acc.mean() == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("sample_rician kappa one matches the noncentral mean") {
    const CVector los = upa_steering(4, 0.05, 0.1, 0.7, 0.1);
    const RicianParams p = RicianParams::uncorrelated(1.0, los);
    Stream rng(3);
    StatAccumulator magnitude;
    StatAccumulator scatter;
    for (int i = 0; i < 50000; ++i) {
        const CMatrix x = sample_rician(p, 4, 1, rng);
        magnitude.add(std::abs(x(2, 0)));
        scatter.add(std::norm(x(2, 0) - std::sqrt(0.5) * los(2)));
    }
    CHECK(scatter.mean() == doctest::Approx(0.5).epsilon(0.01));
    CHECK(magnitude.mean() == doctest::Approx(mean_abs_noncentral(std::sqrt(0.5), 0.5)).epsilon(0.01));
}

TEST_CASE("sample_rician rejects mismatched dimensions") {
    const RicianParams p = RicianParams::rayleigh(3, 2);
    Stream rng(4);
    CHECK_THROWS_AS(sample_rician(p, 2, 3, rng), std::invalid_argument);
    RicianParams q = RicianParams::rayleigh(3, 1);
    auto corr = std::make_shared<SpatialCorrelation>();
    corr->matrix = upa_correlation(4, 0.05, 0.1);
    corr->sqrt = correlation_sqrt(corr->matrix);
    q.correlation = corr;
    CHECK_THROWS_AS(sample_rician(q, 3, 1, rng), std::invalid_argument);
}

TEST_CASE("steering vectors have unit-magnitude entries") {
    const CVector a = upa_steering(12, 0.05, 0.1, 0.4, -0.3);
    const CVector b = ula_steering(4, 0.05, 0.1, 1.1);
    for (int i = 0; i < a.size(); ++i) CHECK(std::abs(a(i)) == doctest::Approx(1.0));
    for (int i = 0; i < b.size(); ++i) CHECK(std::abs(b(i)) == doctest::Approx(1.0));
}

TEST_CASE("scenario defaults and validation") {
    Scenario s;
    CHECK_NOTHROW(s.validate());
    CHECK(s.num_ues() == 10);
    CHECK(s.rb_bandwidth_hz() == doctest::Approx(400e3));
    s.num_elements = -1;
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("num_elements"), std::invalid_argument);
    s = Scenario{};
    s.wavelength = 0.0;
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("wavelength"), std::invalid_argument);
}

TEST_CASE("network state without DUEs has no direct links") {
    Scenario s = small_scenario();
    s.num_due = 0;
    const NetworkState state = sample_network_state(s, 1, 0, 9);
    CHECK(state.h.empty());
    CHECK(state.G.size() == 2);
    CHECK(state.f.size() == 2);
}

TEST_CASE("network state dimensions and determinism") {
    const Scenario s = small_scenario();
    const ChannelModel model(s);
    const NetworkState a = model.sample(9, 3, 1);
    const NetworkState b = model.sample(9, 3, 1);
    const NetworkState c = model.sample(9, 3, 0);
    REQUIRE(a.h.size() == 2);
    CHECK(a.h[0].size() == s.num_bs_antennas);
    CHECK(a.G[1].rows() == s.num_elements);
    CHECK(a.G[1].cols() == s.num_bs_antennas);
    CHECK(a.f_cross[0][1].size() == s.num_elements);
    CHECK(a.f_cross[0][0].size() == 0);
    CHECK(a.slot == 3);
    CHECK(a.rb == 1);
    for (std::size_t k = 0; k < a.h.size(); ++k) CHECK(a.h[k] == b.h[k]);
    for (std::size_t k = 0; k < a.G.size(); ++k) {
        CHECK(a.G[k] == b.G[k]);
        CHECK(a.f[k] == b.f[k]);
        CHECK(a.f_cross[1 - k][k] == b.f_cross[1 - k][k]);
    }
    CHECK(a.G[0] != c.G[0]);
}

TEST_CASE("link second moments follow the path loss") {
    const Scenario s = small_scenario();
    const ChannelModel model(s);
    StatAccumulator h;
    StatAccumulator g;
    StatAccumulator f;
    StatAccumulator x;
    const int draws = 10000;
    for (int t = 0; t < draws; ++t) {
        const NetworkState state = model.sample(5, t, 0);
        h.add(state.h[0].squaredNorm() / (s.num_bs_antennas * model.bs_due(0).pathloss_linear));
        g.add(state.G[1].squaredNorm() / (s.num_elements * s.num_bs_antennas * model.bs_ris(1).pathloss_linear));
        f.add(state.f[0].squaredNorm() / (s.num_elements * model.ris_rue(0).pathloss_linear));
        x.add(state.f_cross[1][0].squaredNorm() / (s.num_elements * model.cross(1, 0).pathloss_linear));
    }
    CHECK(h.mean() == doctest::Approx(1.0).epsilon(0.02));
    CHECK(g.mean() == doctest::Approx(1.0).epsilon(0.02));
    CHECK(f.mean() == doctest::Approx(1.0).epsilon(0.02));
    CHECK(x.mean() == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("geometry gives the expected path losses") {
    const Scenario s;
    const ChannelModel model(s);
    const double bu = std::hypot(s.d_bu, s.height_bs - s.height_ue);
    const double br = std::hypot(s.d_br, s.height_bs - s.height_ris);
    const double ru = std::hypot(s.d_ru, s.height_ris - s.height_ue);
    CHECK(model.bs_due(0).pathloss_linear == doctest::Approx(pathloss_linear(bu, 3.7, -30.0)));
    CHECK(model.bs_ris(0).pathloss_linear == doctest::Approx(pathloss_linear(br, 2.2, -30.0)));
    CHECK(model.ris_rue(0).pathloss_linear == doctest::Approx(pathloss_linear(ru, 2.2, -30.0)));
    // interfering RIS sits farther from the user than its own RIS
    CHECK(model.cross(1, 0).pathloss_linear < model.ris_rue(0).pathloss_linear);
    CHECK_THROWS_AS(model.cross(0, 0), std::invalid_argument);
}
