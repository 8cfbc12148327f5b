#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "rislab/random.hpp"
#include "rislab/types.hpp"

namespace rislab {

struct Scenario {
    int num_bs_antennas = 2;
    int num_elements = 100;
    int num_due = 5;
    int num_rue = 5;
    int num_rbs = 25;

    double d_bu = 50.0;
    double d_br = 100.0;
    double d_ru = 3.0;
    double height_bs = 25.0;
    double height_ris = 10.0;
    double height_ue = 1.5;

    double exponent_bs_due = 3.7;
    double exponent_bs_ris = 2.2;
    double exponent_ris_rue = 2.2;
    double pathloss_const_db = -30.0;

    double wavelength = 0.1;
    double element_spacing = 0.05;
    // false replaces the UPA correlation with identity
    bool correlated = true;

    double kappa_bs_ris = 1.0;  // kappa_b
    double kappa_ris_rue = 1.0;  // kappa_r
    double kappa_bs_due = 1.0;  // kappa_d

    double tx_psd_dbm_hz = -20.0;
    double noise_psd_dbm_hz = -174.0;
    double bandwidth_hz = 10e6;

    int num_ues() const { return num_due + num_rue; }
    double rb_bandwidth_hz() const { return bandwidth_hz / num_rbs; }
    // throws std::invalid_argument naming the offending field
    void validate() const;
};

struct SpatialCorrelation {
    CMatrix matrix;
    CMatrix sqrt;
};

struct RicianParams {
    double kappa = 0.0;
    CMatrix los;
    // null means R = I
    std::shared_ptr<const SpatialCorrelation> correlation;
    double pathloss_linear = 1.0;

    // convenience for an uncorrelated rows x cols link
    static RicianParams uncorrelated(double kappa, CMatrix los, double pathloss_linear = 1.0);
    static RicianParams rayleigh(int rows, int cols, double pathloss_linear = 1.0);
};

struct NetworkState {
    std::vector<CVector> h;  // per DUE, length M
    std::vector<CMatrix> G;  // per RUE, N x M
    std::vector<CVector> f;  // per RUE, length N
    // f_cross[j][k]: RIS j to RUE k, length N; diagonal left empty (f[k] is the serving link)
    std::vector<std::vector<CVector>> f_cross;
    int slot = 0;
    int rb = 0;
};

// Rectangular grid used for N elements: height <= width, height * width == N.
std::pair<int, int> upa_shape(int num_elements);

CMatrix upa_correlation(int num_elements, double spacing, double wavelength);

// Hermitian PSD square root via eigendecomposition, negative eigenvalues clipped.
CMatrix correlation_sqrt(const CMatrix& correlation);

double pathloss_linear(double distance, double exponent, double const_db);

CMatrix sample_rician(const RicianParams& params, int rows, int cols, Stream& rng);

// Far-field steering vectors (unit-magnitude entries).
CVector upa_steering(int num_elements, double spacing, double wavelength, double azimuth,
                     double elevation);
CVector ula_steering(int num_antennas, double spacing, double wavelength, double angle);

// Large-scale model of a scenario: per-link Rician parameters built once.
class ChannelModel {
public:
    explicit ChannelModel(Scenario scenario);

    const Scenario& scenario() const { return scenario_; }

    const RicianParams& bs_due(int k) const { return bs_due_.at(k); }
    const RicianParams& bs_ris(int k) const { return bs_ris_.at(k); }
    const RicianParams& ris_rue(int k) const { return ris_rue_.at(k); }
    const RicianParams& cross(int j, int k) const;

    // fresh small-scale realization for slot t and RB f
    NetworkState sample(std::uint64_t seed, int slot, int rb) const;

private:
    Scenario scenario_;
    std::vector<RicianParams> bs_due_;
    std::vector<RicianParams> bs_ris_;
    std::vector<RicianParams> ris_rue_;
    std::vector<std::vector<RicianParams>> cross_;
};

NetworkState sample_network_state(const Scenario& scenario, int slot, int rb, std::uint64_t seed);

}  // namespace rislab
