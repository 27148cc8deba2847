#include "hopf/noise.hpp"

#include "hopf/random.hpp"

#include <bit>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hopf {

namespace {

// Nearest integer to `ratio`, provided it is within 1e-9 (relative for large ratios).
std::int64_t commensurate(double ratio, const char* what) {
    const double n = std::round(ratio);
    if (!std::isfinite(ratio) || std::abs(ratio - n) > 1e-9 * std::max(1.0, std::abs(n)))
        throw std::invalid_argument(std::string(what) + ": not on the time grid");
    return static_cast<std::int64_t>(n);
}

}  // namespace

WienerPath::WienerPath(std::int64_t first_index, double dt, Samples2 increments, std::uint64_t seed)
    : first_index_(first_index), dt_(dt), increments_(std::move(increments)), seed_(seed) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("WienerPath: dt must be positive");
}

Samples2 WienerPath::cumulative() const {
    Samples2 out(2, steps() + 1);
    out.col(0).setZero();
    for (Eigen::Index k = 0; k < steps(); ++k) out.col(k + 1) = out.col(k) + increments_.col(k);
    return out;
}

std::int64_t WienerPath::grid_index(double t) const {
    return commensurate(t / dt_, "WienerPath::grid_index") - first_index_;
}

WienerPath sample_path(std::uint64_t seed, double t0, double t1, double dt, std::uint64_t stream) {
    if (!(dt > 0.0)) throw std::invalid_argument("sample_path: dt must be positive");
    if (!(t1 > t0)) throw std::invalid_argument("sample_path: need t1 > t0");
    const std::int64_t first = commensurate(t0 / dt, "sample_path: t0");
    const std::int64_t steps = commensurate((t1 - t0) / dt, "sample_path: (t1 - t0) / dt");

    const CounterRng rng(derive_key(seed, stream, std::bit_cast<std::uint64_t>(dt)));
    const double scale = std::sqrt(dt);
    Samples2 inc(2, steps);
    for (std::int64_t k = 0; k < steps; ++k) {
        const auto [g1, g2] = rng.normal_pair(static_cast<std::uint64_t>(first + k));
        inc(0, k) = scale * g1;
        inc(1, k) = scale * g2;
    }
    return WienerPath(first, dt, std::move(inc), seed);
}

WienerPath shift(const WienerPath& path, double s) {
    const std::int64_t m = commensurate(s / path.dt(), "shift: s");
    const Eigen::Index n = path.steps();
    if (m >= n || -m >= n) throw std::invalid_argument("shift: shifted window does not overlap the path");
    if (m >= 0) return WienerPath(path.first_index(), path.dt(), path.increments().rightCols(n - m), path.seed());
    return WienerPath(path.first_index() - m, path.dt(), path.increments().leftCols(n + m), path.seed());
}

WienerPath coarsen(const WienerPath& path, int factor) {
    if (factor < 1 || path.steps() % factor != 0 || path.first_index() % factor != 0)
        throw std::invalid_argument("coarsen: factor must divide the grid");
    Samples2 inc(2, path.steps() / factor);
    for (Eigen::Index k = 0; k < inc.cols(); ++k)
        inc.col(k) = path.increments().middleCols(k * factor, factor).rowwise().sum();
    return WienerPath(path.first_index() / factor, path.dt() * factor, std::move(inc), path.seed());
}

Samples2 ou_process(const WienerPath& path, double c, const State& z_init) {
    if (!(c > 0.0)) throw std::invalid_argument("ou_process: c must be positive");
    const double dt = path.dt();
    const double decay = std::exp(-c * dt);
    const double scale = std::sqrt(-std::expm1(-2.0 * c * dt) / (2.0 * c * dt));
    Samples2 z(2, path.steps() + 1);
    z.col(0) = z_init;
    for (Eigen::Index k = 0; k < path.steps(); ++k) z.col(k + 1) = decay * z.col(k) + scale * path.increment(k);
    return z;
}

ControlPath::ControlPath(double t0, double dt, Samples2 samples) : t0_(t0), dt_(dt), samples_(std::move(samples)) {
    if (!(dt > 0.0)) throw std::invalid_argument("ControlPath: dt must be positive");
    if (samples_.cols() < 2) throw std::invalid_argument("ControlPath: need at least one step");
}

State ControlPath::operator()(double t) const {
    const double u = (t - t0_) / dt_;
    if (u <= 0.0) return samples_.col(0);
    if (u >= static_cast<double>(steps())) return samples_.col(steps());
    const auto k = static_cast<Eigen::Index>(std::floor(u));
    const double w = u - static_cast<double>(k);
    return (1.0 - w) * samples_.col(k) + w * samples_.col(k + 1);
}

ControlPath steering_path_hold(const Params& p, const State& z, double T, double dt) {
    if (!(p.sigma() > 0.0)) throw std::invalid_argument("steering_path_hold: requires sigma > 0");
    if (!(T > 0.0) || !(dt > 0.0)) throw std::invalid_argument("steering_path_hold: need T, dt > 0");
    const std::int64_t n = commensurate(T / dt, "steering_path_hold: T / dt");
    const State slope = -drift(p, z) / p.sigma();
    Samples2 h(2, n + 1);
    for (std::int64_t i = 0; i <= n; ++i) h.col(i) = (static_cast<double>(i) * dt) * slope;
    return ControlPath(0.0, dt, std::move(h));
}

ControlPath steering_path_line(const Params& p, const State& x, const State& y, double t0, double dt) {
    if (!(p.sigma() > 0.0)) throw std::invalid_argument("steering_path_line: requires sigma > 0");
    if (!(t0 > 0.0) || !(dt > 0.0)) throw std::invalid_argument("steering_path_line: need t0, dt > 0");
    const std::int64_t n = commensurate(t0 / dt, "steering_path_line: t0 / dt");
    auto psi = [&](std::int64_t i) -> State { return x + (static_cast<double>(i) / static_cast<double>(n)) * (y - x); };

    Samples2 h(2, n + 1);
    h.col(0).setZero();
    State integral = State::Zero();
    State f_prev = drift(p, psi(0));
    for (std::int64_t i = 1; i <= n; ++i) {
        const State f_next = drift(p, psi(i));
        integral += 0.5 * dt * (f_prev + f_next);
        f_prev = f_next;
        h.col(i) = (psi(i) - x - integral) / p.sigma();
    }
    return ControlPath(0.0, dt, std::move(h));
}

void write_path_csv(std::ostream& os, const WienerPath& path) {
    const auto old_precision = os.precision(17);
    os << "# dt=" << path.dt() << '\n' << "t,dW1,dW2\n";
    for (Eigen::Index k = 0; k < path.steps(); ++k)
        os << path.time(k) << ',' << path.increment(k)(0) << ',' << path.increment(k)(1) << '\n';
    os.precision(old_precision);
}

WienerPath read_path_csv(std::istream& is, std::uint64_t seed) {
    std::string line;
    bool header = false;
    std::vector<double> t, w1, w2;
    double dt = 0.0;
    while (std::getline(is, line)) {
        if (line.rfind("# dt=", 0) == 0) dt = std::stod(line.substr(5));
        if (line.empty() || line.front() == '#') continue;
        if (!header) {
            if (line != "t,dW1,dW2") throw std::invalid_argument("read_path_csv: bad header '" + line + "'");
            header = true;
            continue;
        }
        std::istringstream row(line);
        std::string cell[3];
        for (auto& c : cell)
            if (!std::getline(row, c, ',')) throw std::invalid_argument("read_path_csv: short row");
        t.push_back(std::stod(cell[0]));
        w1.push_back(std::stod(cell[1]));
        w2.push_back(std::stod(cell[2]));
    }
    if (t.empty() || (t.size() < 2 && dt == 0.0)) throw std::invalid_argument("read_path_csv: cannot infer the grid");
    if (dt == 0.0) dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    Samples2 inc(2, static_cast<Eigen::Index>(t.size()));
    for (std::size_t k = 0; k < t.size(); ++k) {
        inc(0, static_cast<Eigen::Index>(k)) = w1[k];
        inc(1, static_cast<Eigen::Index>(k)) = w2[k];
    }
    return WienerPath(commensurate(t.front() / dt, "read_path_csv: t0"), dt, std::move(inc), seed);
}

}  // namespace hopf
