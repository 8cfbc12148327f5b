#include "rislab/beamforming.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rislab/numerics.hpp"

namespace rislab {

namespace {

double from_dbm(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

void require_dims(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

void require_unit(const CVector& w) {
    if (std::abs(w.norm() - 1.0) > 1e-9) throw std::invalid_argument("precoder must have unit norm");
}

// e^{j theta} weighted by the coupled amplitude
cd reflection_coefficient(double theta) { return std::polar(reflection_amplitude(theta), theta); }

}  // namespace

double reflection_amplitude(double theta) {
    // a small tolerance lets callers pass +pi computed in floating point
    if (!(theta >= -kPi - 1e-12 && theta <= kPi + 1e-12))
        throw std::domain_error("reflection_amplitude: phase outside [-pi, pi]");
    const double s = (std::sin(theta - 0.43 * kPi) + 1.0) / 2.0;
    return (1.0 - kMinAmplitude) * std::pow(s, 1.6) + kMinAmplitude;
}

PhaseSet PhaseSet::discrete(int bits) {
    if (bits < 1) throw std::invalid_argument("phase set needs at least one bit");
    if (bits > 16) throw std::invalid_argument("phase set resolution above 16 bits is not supported");
    PhaseSet set;
    set.bits_ = bits;
    const int count = 1 << bits;
    for (int i = 0; i < count; ++i) set.phases_.push_back(-kPi + i * 2.0 * kPi / count);
    return set;
}

PhaseSet PhaseSet::continuous() { return PhaseSet{}; }

int PhaseSet::bits() const {
    if (!bits_) throw std::logic_error("continuous phase set has no bit count");
    return *bits_;
}

PhaseSet make_phase_set(int bits) { return PhaseSet::discrete(bits); }

ReflectionMatrix::ReflectionMatrix(std::vector<double> phases) : phases_(std::move(phases)) {
    amplitudes_.reserve(phases_.size());
    for (double theta : phases_) amplitudes_.push_back(reflection_amplitude(theta));
}

ReflectionMatrix ReflectionMatrix::uniform(double phase, int num_elements) {
    return ReflectionMatrix(std::vector<double>(static_cast<std::size_t>(num_elements), phase));
}

CVector ReflectionMatrix::diagonal() const {
    CVector d(size());
    for (int n = 0; n < size(); ++n) d(n) = std::polar(amplitudes_[n], phases_[n]);
    return d;
}

LinkBudget LinkBudget::from_scenario(const Scenario& scenario) {
    LinkBudget b;
    b.tx_power = from_dbm(scenario.tx_psd_dbm_hz) * scenario.rb_bandwidth_hz();
    b.noise_power = from_dbm(scenario.noise_psd_dbm_hz) * scenario.rb_bandwidth_hz();
    return b;
}

void LinkBudget::validate() const {
    if (!(tx_power > 0.0)) throw std::invalid_argument("link budget: tx_power must be > 0");
    if (!(noise_power > 0.0)) throw std::invalid_argument("link budget: noise_power must be > 0");
    if (!(symbol_energy_due > 0.0)) throw std::invalid_argument("link budget: symbol_energy_due must be > 0");
    if (!(symbol_energy_rue > 0.0)) throw std::invalid_argument("link budget: symbol_energy_rue must be > 0");
}

int strongest_antenna(const CMatrix& G) {
    if (G.cols() < 1) throw std::invalid_argument("strongest_antenna: no antennas");
    int best = 0;
    double best_norm = G.col(0).squaredNorm();
    for (int m = 1; m < G.cols(); ++m) {
        const double norm = G.col(m).squaredNorm();
        if (norm > best_norm) {
            best = m;
            best_norm = norm;
        }
    }
    return best;
}

BeamformResult greedy_phase_selection(const CVector& f, const CMatrix& G, const PhaseSet& phases,
                                      const LinkBudget& budget) {
    const int n = static_cast<int>(f.size());
    require_dims(n >= 1 && G.rows() == n && G.cols() >= 1, "greedy_phase_selection");
    if (!phases.is_continuous() && phases.phases().empty())
        throw std::invalid_argument("greedy_phase_selection: empty phase set");

    BeamformResult result;
    result.selected_antenna = strongest_antenna(G);
    const auto& candidates = phases.phases();
    std::vector<cd> coefficients;
    for (double theta : candidates) coefficients.push_back(reflection_coefficient(theta));

    std::vector<double> chosen(n);
    result.trace.reserve(n);
    cd s = 0.0;
    for (int i = 0; i < n; ++i) {
        const cd a = std::conj(f(i)) * G(i, result.selected_antenna);
        if (phases.is_continuous()) {
            chosen[i] = a == cd(0.0) ? -kPi : wrap_phase(-std::arg(a));
            s += a * reflection_coefficient(chosen[i]);
            ++result.evaluations;
        } else {
            std::size_t best = 0;
            double best_value = -1.0;
            for (std::size_t q = 0; q < candidates.size(); ++q) {
                const double value = std::norm(s + a * coefficients[q]);
                ++result.evaluations;
                if (value > best_value) {
                    best = q;
                    best_value = value;
                }
            }
            chosen[i] = candidates[best];
            s += a * coefficients[best];
        }
        result.trace.push_back(std::abs(s));
    }
    result.reflection = ReflectionMatrix(std::move(chosen));
    result.snr = budget.tx_power * budget.symbol_energy_rue * std::norm(s) / budget.noise_power;
    return result;
}

Eigen::RowVectorXcd cascade_row(const CVector& f, const ReflectionMatrix& reflection, const CMatrix& G) {
    require_dims(f.size() == reflection.size() && G.rows() == f.size(), "cascade_row");
    const CVector weighted = f.conjugate().cwiseProduct(reflection.diagonal());
    return weighted.transpose() * G;
}

double cascade_gain(const CVector& f, const ReflectionMatrix& reflection, const CMatrix& G) {
    return cascade_row(f, reflection, G).squaredNorm();
}

OracleResult exhaustive_phase_search(const CVector& f, const CMatrix& G, const PhaseSet& phases) {
    const int n = static_cast<int>(f.size());
    require_dims(n >= 1 && G.rows() == n, "exhaustive_phase_search");
    if (phases.is_continuous()) throw std::invalid_argument("exhaustive_phase_search: needs a discrete phase set");
    const int bits = phases.bits();
    if (static_cast<long long>(bits) * n > 20)
        throw std::invalid_argument("exhaustive_phase_search: search space exceeds 2^20 configurations");

    const auto& candidates = phases.phases();
    const std::size_t q = candidates.size();
    // per-element contribution rows conj(f_n) phi(theta) G_n for every candidate
    std::vector<std::vector<Eigen::RowVectorXcd>> terms(n);
    for (int i = 0; i < n; ++i)
        for (double theta : candidates) terms[i].push_back(std::conj(f(i)) * reflection_coefficient(theta) * G.row(i));

    std::vector<std::size_t> digits(n, 0);
    std::vector<std::size_t> best_digits(n, 0);
    double best_value = -1.0;
    const std::size_t total = std::size_t{1} << (bits * n);
    for (std::size_t config = 0; config < total; ++config) {
        std::size_t rest = config;
        Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(G.cols());
        for (int i = 0; i < n; ++i) {
            digits[i] = rest % q;
            rest /= q;
            row += terms[i][digits[i]];
        }
        const double value = row.squaredNorm();
        if (value > best_value) {
            best_value = value;
            best_digits = digits;
        }
    }
    std::vector<double> best_phases(n);
    for (int i = 0; i < n; ++i) best_phases[i] = candidates[best_digits[i]];
    return {ReflectionMatrix(std::move(best_phases)), best_value};
}

CVector antenna_selection_precoder(const CMatrix& G) {
    CVector w = CVector::Zero(G.cols());
    w(strongest_antenna(G)) = 1.0;
    return w;
}

CVector mrt_precoder(const CVector& effective_channel) {
    const double norm = effective_channel.norm();
    if (!(norm > 0.0)) throw std::invalid_argument("mrt_precoder: zero channel");
    return effective_channel / norm;
}

double snr_rue(const CVector& f, const ReflectionMatrix& reflection, const CMatrix& G, const CVector& w,
               const LinkBudget& budget) {
    require_dims(w.size() == G.cols(), "snr_rue");
    require_unit(w);
    const cd y = (cascade_row(f, reflection, G) * w)(0);
    return budget.tx_power * budget.symbol_energy_rue * std::norm(y) / budget.noise_power;
}

double snr_due(const CVector& h, const CVector& w, const LinkBudget& budget) {
    require_dims(w.size() == h.size(), "snr_due");
    require_unit(w);
    return budget.tx_power * budget.symbol_energy_due * std::norm(h.dot(w)) / budget.noise_power;
}

double snr_upper_ideal(const CVector& f, const CMatrix& G, const LinkBudget& budget) {
    require_dims(G.rows() == f.size(), "snr_upper_ideal");
    const RVector per_antenna = G.cwiseAbs().transpose() * f.cwiseAbs();
    return budget.tx_power * per_antenna.squaredNorm() / budget.noise_power;
}

double snr_lower_bound_realization(const CVector& f, const CMatrix& G, int m0, const LinkBudget& budget) {
    require_dims(G.rows() == f.size(), "snr_lower_bound_realization");
    if (m0 < 0 || m0 >= G.cols()) throw std::invalid_argument("snr_lower_bound_realization: invalid antenna index");
    double total = 0.0;
    for (int m = 0; m < G.cols(); ++m) {
        cd sum = 0.0;
        for (int n = 0; n < f.size(); ++n) {
            const double magnitude = std::abs(f(n)) * std::abs(G(n, m));
            if (m == m0) {
                sum += magnitude;
            } else {
                sum += std::polar(magnitude, std::arg(G(n, m)) - std::arg(G(n, m0)));
            }
        }
        total += std::norm(sum);
    }
    return budget.tx_power * budget.symbol_energy_rue * kMinAmplitude * kMinAmplitude * total / budget.noise_power;
}

namespace {

double element_power(const RicianParams& p, int n, ScatteringPower power) {
    if (!p.correlation) return 1.0;
    const CMatrix& r = p.correlation->matrix;
    if (power == ScatteringPower::kDiagonal) return r(n, n).real();
    return r.row(n).cwiseAbs().sum();
}

// E|x_n| for entry (n, col) of a Rician link
double mean_entry_magnitude(const RicianParams& p, int n, int col, ScatteringPower power) {
    const double los = std::sqrt(p.pathloss_linear * p.kappa / (p.kappa + 1.0)) * std::abs(p.los(n, col));
    const double variance = p.pathloss_linear / (p.kappa + 1.0) * element_power(p, n, power);
    return mean_abs_noncentral(los, variance);
}

}  // namespace

double mean_snr_lower_bound(const RicianParams& cascade, const RicianParams& ris_user, int m0,
                            const LinkBudget& budget, ScatteringPower power) {
    const int n = static_cast<int>(cascade.los.rows());
    if (ris_user.los.rows() != n || ris_user.los.cols() != 1)
        throw std::invalid_argument("mean_snr_lower_bound: dimension mismatch");
    if (m0 < 0 || m0 >= cascade.los.cols()) throw std::invalid_argument("mean_snr_lower_bound: invalid antenna index");
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        sum += mean_entry_magnitude(cascade, i, m0, power) * mean_entry_magnitude(ris_user, i, 0, power);
    return budget.tx_power * budget.symbol_energy_rue * kMinAmplitude * kMinAmplitude * sum * sum / budget.noise_power;
}

Moments rayleigh_snr_moments(int num_elements, int num_antennas, const LinkBudget& budget) {
    if (num_elements < 1 || num_antennas < 1) throw std::invalid_argument("rayleigh_snr_moments: N and M must be >= 1");
    const double n = num_elements;
    const double m = num_antennas;
    const double pi2 = kPi * kPi;
    const double scale = budget.tx_power * budget.symbol_energy_rue * kMinAmplitude * kMinAmplitude / budget.noise_power;
    Moments out;
    out.mean = n * scale * (m + pi2 * (n - 1.0) / 16.0);
    out.variance = n * n * scale * scale * ((1.0 - pi2 / 16.0) * (2.0 - pi2 / 8.0 + n * pi2 / 4.0) + m - 1.0);
    return out;
}

}  // namespace rislab
