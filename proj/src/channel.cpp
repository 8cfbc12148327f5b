#include "rislab/channel.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>

namespace rislab {

namespace {

void require(bool ok, const char* field) {
    if (!ok) throw std::invalid_argument(std::string("scenario: invalid value for ") + field);
}

double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    return std::sin(kPi * x) / (kPi * x);
}

// Deterministic LoS angles per (link kind, index): azimuth in [-pi/2, pi/2), elevation in
// [-pi/4, pi/4].
std::pair<double, double> los_angles(LinkTag tag, std::uint64_t index) {
    Stream s(derive_key(0x5eedf00dULL, {static_cast<std::uint64_t>(tag), index}));
    const double azimuth = -0.5 * kPi + kPi * s.uniform();
    const double elevation = -0.25 * kPi + 0.5 * kPi * s.uniform();
    return {azimuth, elevation};
}

struct Point {
    double x, y, z;
};

double distance(const Point& a, const Point& b) {
    return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

Point on_circle(double radius, double angle, double height) {
    return {radius * std::cos(angle), radius * std::sin(angle), height};
}

std::shared_ptr<const SpatialCorrelation> shared_upa(int n, double spacing, double wavelength) {
    static std::mutex lock;
    static std::map<std::tuple<int, double, double>, std::shared_ptr<const SpatialCorrelation>> cache;
    const auto key = std::make_tuple(n, spacing, wavelength);
    std::lock_guard<std::mutex> guard(lock);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto corr = std::make_shared<SpatialCorrelation>();
    corr->matrix = upa_correlation(n, spacing, wavelength);
    corr->sqrt = correlation_sqrt(corr->matrix);
    cache.emplace(key, corr);
    return corr;
}

}  // namespace

void Scenario::validate() const {
    require(num_bs_antennas >= 1, "num_bs_antennas");
    require(num_elements >= 1, "num_elements");
    require(num_due >= 0, "num_due");
    require(num_rue >= 0, "num_rue");
    require(num_rbs >= 1, "num_rbs");
    require(d_bu >= 1.0, "d_bu");
    require(d_br >= 1.0, "d_br");
    require(d_ru > 0.0, "d_ru");
    require(height_bs > 0.0, "height_bs");
    require(height_ris > 0.0, "height_ris");
    require(height_ue > 0.0, "height_ue");
    require(exponent_bs_due >= 0.0, "exponent_bs_due");
    require(exponent_bs_ris >= 0.0, "exponent_bs_ris");
    require(exponent_ris_rue >= 0.0, "exponent_ris_rue");
    require(std::isfinite(pathloss_const_db), "pathloss_const_db");
    require(wavelength > 0.0, "wavelength");
    require(element_spacing > 0.0, "element_spacing");
    require(kappa_bs_ris >= 0.0, "kappa_bs_ris");
    require(kappa_ris_rue >= 0.0, "kappa_ris_rue");
    require(kappa_bs_due >= 0.0, "kappa_bs_due");
    require(std::isfinite(tx_psd_dbm_hz), "tx_psd_dbm_hz");
    require(std::isfinite(noise_psd_dbm_hz), "noise_psd_dbm_hz");
    require(bandwidth_hz > 0.0, "bandwidth_hz");
}

RicianParams RicianParams::uncorrelated(double kappa, CMatrix los, double pathloss_linear) {
    RicianParams p;
    p.kappa = kappa;
    p.los = std::move(los);
    p.pathloss_linear = pathloss_linear;
    return p;
}

RicianParams RicianParams::rayleigh(int rows, int cols, double pathloss_linear) {
    return uncorrelated(0.0, CMatrix::Zero(rows, cols), pathloss_linear);
}

std::pair<int, int> upa_shape(int num_elements) {
    if (num_elements < 1) throw std::invalid_argument("upa_shape: need at least one element");
    int height = static_cast<int>(std::sqrt(static_cast<double>(num_elements)));
    while (height * height > num_elements) --height;
    while (num_elements % height != 0) --height;
    return {height, num_elements / height};
}

CMatrix upa_correlation(int num_elements, double spacing, double wavelength) {
    if (!(spacing > 0.0)) throw std::invalid_argument("upa_correlation: spacing must be > 0");
    if (!(wavelength > 0.0)) throw std::invalid_argument("upa_correlation: wavelength must be > 0");
    const int width = upa_shape(num_elements).second;
    CMatrix r(num_elements, num_elements);
    for (int n = 0; n < num_elements; ++n) {
        for (int j = n; j < num_elements; ++j) {
            const double dx = (n % width - j % width) * spacing;
            const double dy = (n / width - j / width) * spacing;
            const double value = sinc(2.0 * std::hypot(dx, dy) / wavelength);
            r(n, j) = value;
            r(j, n) = value;
        }
    }
    return r;
}

CMatrix correlation_sqrt(const CMatrix& correlation) {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(correlation);
    if (eig.info() != Eigen::Success) throw std::runtime_error("correlation_sqrt: eigensolver failed");
    const RVector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().adjoint();
}

double pathloss_linear(double distance, double exponent, double const_db) {
    if (!(distance >= 1.0)) throw std::domain_error("pathloss_linear: distance below 1 m reference");
    return std::pow(10.0, (const_db - 10.0 * exponent * std::log10(distance)) / 10.0);
}

CMatrix sample_rician(const RicianParams& params, int rows, int cols, Stream& rng) {
    if (params.los.rows() != rows || params.los.cols() != cols)
        throw std::invalid_argument("sample_rician: LoS dimensions do not match");
    if (params.correlation && params.correlation->sqrt.rows() != rows)
        throw std::invalid_argument("sample_rician: correlation dimension does not match");
    CMatrix w(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) w(r, c) = rng.complex_normal();
    const double los_weight = std::sqrt(params.kappa / (params.kappa + 1.0));
    const double nlos_weight = std::sqrt(1.0 / (params.kappa + 1.0));
    const double scale = std::sqrt(params.pathloss_linear);
    if (params.correlation) return scale * (los_weight * params.los + nlos_weight * (params.correlation->sqrt * w));
    return scale * (los_weight * params.los + nlos_weight * w);
}

CVector upa_steering(int num_elements, double spacing, double wavelength, double azimuth,
                     double elevation) {
    const int width = upa_shape(num_elements).second;
    const double k = 2.0 * kPi * spacing / wavelength;
    const double u = std::sin(azimuth) * std::cos(elevation);
    const double v = std::sin(elevation);
    CVector a(num_elements);
    for (int n = 0; n < num_elements; ++n) a(n) = std::polar(1.0, k * ((n % width) * u + (n / width) * v));
    return a;
}

CVector ula_steering(int num_antennas, double spacing, double wavelength, double angle) {
    const double k = 2.0 * kPi * spacing / wavelength;
    CVector a(num_antennas);
    for (int m = 0; m < num_antennas; ++m) a(m) = std::polar(1.0, k * m * std::sin(angle));
    return a;
}

ChannelModel::ChannelModel(Scenario scenario) : scenario_(std::move(scenario)) {
    const Scenario& s = scenario_;
    s.validate();
    const int n = s.num_elements;
    const int m = s.num_bs_antennas;
    const int k_total = s.num_ues();
    const double bs_spacing = 0.5 * s.wavelength;

    std::shared_ptr<const SpatialCorrelation> corr;
    if (s.correlated) corr = shared_upa(n, s.element_spacing, s.wavelength);

    const Point bs{0.0, 0.0, s.height_bs};
    auto angle_of = [&](int ue) { return 2.0 * kPi * ue / k_total; };

    for (int k = 0; k < s.num_due; ++k) {
        const Point ue = on_circle(s.d_bu, angle_of(k), s.height_ue);
        const auto [az, el] = los_angles(LinkTag::kBsDue, k);
        (void)el;
        RicianParams p = RicianParams::uncorrelated(
            s.kappa_bs_due, ula_steering(m, bs_spacing, s.wavelength, az),
            pathloss_linear(distance(bs, ue), s.exponent_bs_due, s.pathloss_const_db));
        bs_due_.push_back(std::move(p));
    }

    std::vector<Point> ris_pos;
    std::vector<Point> rue_pos;
    for (int r = 0; r < s.num_rue; ++r) {
        const double angle = angle_of(s.num_due + r);
        ris_pos.push_back(on_circle(s.d_br, angle, s.height_ris));
        rue_pos.push_back(on_circle(s.d_br + s.d_ru, angle, s.height_ue));
    }

    for (int r = 0; r < s.num_rue; ++r) {
        const auto [az_ris, el_ris] = los_angles(LinkTag::kBsRis, r);
        const CVector a_ris = upa_steering(n, s.element_spacing, s.wavelength, az_ris, el_ris);
        const CVector a_bs = ula_steering(m, bs_spacing, s.wavelength, -az_ris);
        RicianParams g;
        g.kappa = s.kappa_bs_ris;
        g.los = a_ris * a_bs.adjoint();
        g.correlation = corr;
        g.pathloss_linear = pathloss_linear(distance(bs, ris_pos[r]), s.exponent_bs_ris, s.pathloss_const_db);
        bs_ris_.push_back(std::move(g));

        const auto [az_ue, el_ue] = los_angles(LinkTag::kRisRue, r);
        RicianParams f;
        f.kappa = s.kappa_ris_rue;
        f.los = upa_steering(n, s.element_spacing, s.wavelength, az_ue, el_ue);
        f.correlation = corr;
        f.pathloss_linear = pathloss_linear(distance(ris_pos[r], rue_pos[r]), s.exponent_ris_rue, s.pathloss_const_db);
        ris_rue_.push_back(std::move(f));
    }

    cross_.resize(s.num_rue);
    for (int j = 0; j < s.num_rue; ++j) {
        cross_[j].resize(s.num_rue);
        for (int k = 0; k < s.num_rue; ++k) {
            if (j == k) continue;
            const auto [az, el] = los_angles(LinkTag::kCross, static_cast<std::uint64_t>(j) * s.num_rue + k);
            RicianParams p;
            p.kappa = s.kappa_ris_rue;
            p.los = upa_steering(n, s.element_spacing, s.wavelength, az, el);
            p.correlation = corr;
            p.pathloss_linear = pathloss_linear(distance(ris_pos[j], rue_pos[k]), s.exponent_ris_rue, s.pathloss_const_db);
            cross_[j][k] = std::move(p);
        }
    }
}

const RicianParams& ChannelModel::cross(int j, int k) const {
    if (j == k) throw std::invalid_argument("ChannelModel::cross: j == k is the serving link");
    return cross_.at(j).at(k);
}

NetworkState ChannelModel::sample(std::uint64_t seed, int slot, int rb) const {
    const Scenario& s = scenario_;
    const int n = s.num_elements;
    const int m = s.num_bs_antennas;
    const auto t = static_cast<std::uint64_t>(slot);
    const auto f = static_cast<std::uint64_t>(rb);
    auto link = [&](LinkTag tag, std::uint64_t index) {
        return substream(seed, {t, f, static_cast<std::uint64_t>(tag), index});
    };

    NetworkState state;
    state.slot = slot;
    state.rb = rb;
    for (int k = 0; k < s.num_due; ++k) {
        Stream rng = link(LinkTag::kBsDue, k);
        state.h.push_back(sample_rician(bs_due_[k], m, 1, rng).col(0));
    }
    for (int r = 0; r < s.num_rue; ++r) {
        Stream g_rng = link(LinkTag::kBsRis, r);
        state.G.push_back(sample_rician(bs_ris_[r], n, m, g_rng));
        Stream f_rng = link(LinkTag::kRisRue, r);
        state.f.push_back(sample_rician(ris_rue_[r], n, 1, f_rng).col(0));
    }
    state.f_cross.resize(s.num_rue);
    for (int j = 0; j < s.num_rue; ++j) {
        state.f_cross[j].resize(s.num_rue);
        for (int k = 0; k < s.num_rue; ++k) {
            if (j == k) continue;
            Stream rng = link(LinkTag::kCross, static_cast<std::uint64_t>(j) * s.num_rue + k);
            state.f_cross[j][k] = sample_rician(cross_[j][k], n, 1, rng).col(0);
        }
    }
    return state;
}

NetworkState sample_network_state(const Scenario& scenario, int slot, int rb, std::uint64_t seed) {
    return ChannelModel(scenario).sample(seed, slot, rb);
}

}  // namespace rislab
