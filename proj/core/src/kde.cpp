#include "ctxprop/kde.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <string>

namespace ctxprop {

namespace {

double wrap_to_period(double theta, double period) {
    if (period == 2 * kPi) return wrap_angle(theta);
    return elongation_fold(theta);
}

double linear_sigma(const std::vector<PairwiseRelation>& rs,
                    double PairwiseRelation::* dim) {
    double mean = 0;
    for (const auto& r : rs) mean += r.*dim;
    mean /= double(rs.size());
    double var = 0;
    for (const auto& r : rs) var += (r.*dim - mean) * (r.*dim - mean);
    var /= double(rs.size());
    return std::sqrt(var);
}

double circular_sigma(const std::vector<PairwiseRelation>& rs, double period) {
    const double scale = 2 * kPi / period;
    double c = 0, s = 0;
    for (const auto& r : rs) {
        c += std::cos(r.r_theta * scale);
        s += std::sin(r.r_theta * scale);
    }
    const double rbar = std::sqrt(c * c + s * s) / double(rs.size());
    if (rbar >= 1.0) return 0.0;
    return std::sqrt(-2.0 * std::log(rbar)) / scale;
}

double gauss(double d, double h) {
    const double u = d / h;
    return std::exp(-0.5 * u * u) / (h * std::sqrt(2 * kPi));
}

}  // namespace

KdeModel fit_kde(const std::vector<PairwiseRelation>& relations, PoseMode pose_mode,
                 std::optional<Bandwidth> fixed) {
    if (relations.empty()) throw EmptyTrainingSet();
    KdeModel m;
    m.pose_mode = pose_mode;
    m.samples = relations;
    for (auto& r : m.samples) r.r_theta = wrap_to_period(r.r_theta, m.angle_period());
    if (fixed) {
        m.bandwidth = *fixed;
    } else {
        const double factor = 1.06 * std::pow(double(relations.size()), -0.2);
        m.bandwidth.x = factor * linear_sigma(m.samples, &PairwiseRelation::r_x);
        m.bandwidth.z = factor * linear_sigma(m.samples, &PairwiseRelation::r_z);
        m.bandwidth.theta = factor * circular_sigma(m.samples, m.angle_period());
    }
    return m;
}

double kde_density(const KdeModel& m, const PairwiseRelation& r) {
    if (m.bandwidth.x <= 0 || m.bandwidth.z <= 0 || m.bandwidth.theta <= 0)
        throw ZeroBandwidth();
    const double period = m.angle_period();
    const double rt = wrap_to_period(r.r_theta, period);
    double sum = 0;
    for (const auto& s : m.samples) {
        double ang = 0;
        for (int k = -1; k <= 1; ++k)
            ang += gauss(rt - s.r_theta + k * period, m.bandwidth.theta);
        sum += gauss(r.r_x - s.r_x, m.bandwidth.x) *
               gauss(r.r_z - s.r_z, m.bandwidth.z) * ang;
    }
    return sum / double(m.samples.size());
}

PairwiseRelation kde_sample_one(const KdeModel& m, std::mt19937_64& rng) {
    std::uniform_int_distribution<size_t> pick(0, m.samples.size() - 1);
    std::normal_distribution<double> noise(0.0, 1.0);
    const PairwiseRelation& s = m.samples[pick(rng)];
    PairwiseRelation r;
    r.r_x = s.r_x + noise(rng) * m.bandwidth.x;
    r.r_z = s.r_z + noise(rng) * m.bandwidth.z;
    r.r_theta =
        wrap_to_period(s.r_theta + noise(rng) * m.bandwidth.theta, m.angle_period());
    return r;
}

std::vector<PairwiseRelation> kde_sample(const KdeModel& m, std::uint64_t rng_seed,
                                         size_t n) {
    std::mt19937_64 rng(rng_seed);
    std::vector<PairwiseRelation> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) out.push_back(kde_sample_one(m, rng));
    return out;
}

void save_kde(const KdeModel& m, std::ostream& os) {
    os << "CTXPROP_KDE 1\n";
    os << "pose_mode " << (m.pose_mode == PoseMode::FullPose ? "full" : "elongation")
       << "\n";
    os << std::setprecision(17);
    os << "bandwidth " << m.bandwidth.x << ' ' << m.bandwidth.z << ' '
       << m.bandwidth.theta << "\n";
    os << "samples " << m.samples.size() << "\n";
    for (const auto& s : m.samples)
        os << s.r_x << ' ' << s.r_z << ' ' << s.r_theta << "\n";
}

KdeModel load_kde(std::istream& is) {
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != "CTXPROP_KDE" || version != 1)
        throw std::runtime_error("not a KDE model file");
    std::string key, mode;
    KdeModel m;
    is >> key >> mode;
    if (key != "pose_mode") throw std::runtime_error("malformed KDE model: pose_mode");
    m.pose_mode = (mode == "full") ? PoseMode::FullPose : PoseMode::Elongation;
    size_t n = 0;
    is >> key >> m.bandwidth.x >> m.bandwidth.z >> m.bandwidth.theta;
    if (key != "bandwidth") throw std::runtime_error("malformed KDE model: bandwidth");
    is >> key >> n;
    if (key != "samples") throw std::runtime_error("malformed KDE model: samples");
    m.samples.resize(n);
    for (auto& s : m.samples) is >> s.r_x >> s.r_z >> s.r_theta;
    if (!is) throw std::runtime_error("truncated KDE model file");
    return m;
}

}  // namespace ctxprop
