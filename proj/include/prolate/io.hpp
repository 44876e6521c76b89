#ifndef PROLATE_IO_HPP
#define PROLATE_IO_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "prolate/errors.hpp"
#include "prolate/filter_diag.hpp"
#include "prolate/pswf.hpp"
#include "prolate/sampling.hpp"

namespace prolate {
namespace io {

/// Format a double with 17 significant digits, the fixed wire format for
/// every floating-point field (deterministic and round-trip exact).
inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Minimal deterministic JSON emitter; nlohmann::json is used for parsing.
class JsonWriter {
public:
    void begin_object() { sep(); out_ << '{'; fresh_ = true; }
    void end_object() { out_ << '}'; fresh_ = false; }
    void begin_array() { sep(); out_ << '['; fresh_ = true; }
    void end_array() { out_ << ']'; fresh_ = false; }
    void key(const std::string& k) {
        sep();
        out_ << '"' << k << "\":";
        fresh_ = true;
    }
    void number(double v) { sep(); out_ << fmt(v); fresh_ = false; }
    void integer(long v) { sep(); out_ << v; fresh_ = false; }
    void string(const std::string& s) {
        sep();
        out_ << '"';
        for (char c : s) {
            if (c == '"' || c == '\\') out_ << '\\';
            out_ << c;
        }
        out_ << '"';
        fresh_ = false;
    }
    void boolean(bool b) { sep(); out_ << (b ? "true" : "false"); fresh_ = false; }
    void null() { sep(); out_ << "null"; fresh_ = false; }

    template <typename Seq>
    void number_array(const Seq& v) {
        begin_array();
        for (const auto& x : v) number(static_cast<double>(x));
        end_array();
    }

    [[nodiscard]] std::string str() const { return out_.str(); }

private:
    void sep() {
        if (!fresh_) out_ << ',';
        fresh_ = true;
    }
    std::ostringstream out_;
    bool fresh_ = true;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw error("cannot open for writing: " + path);
    f << content;
    if (!f) throw error("write failed: " + path);
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// --- basis JSON ------------------------------------------------------------

inline std::string basis_to_json(const PswfBasis& b) {
    JsonWriter w;
    w.begin_object();
    w.key("c"); w.number(b.spec.c);
    w.key("T"); w.number(b.spec.T);
    w.key("W"); w.number(b.spec.W);
    w.key("N"); w.integer(b.count);
    w.key("chi"); w.number_array(b.chi);
    w.key("lambda"); w.number_array(b.lambda);
    w.key("gamma"); w.number_array(b.gamma);
    w.key("one_minus_gamma"); w.number_array(b.one_minus_gamma);
    w.key("mu_re");
    w.begin_array();
    for (int n = 0; n < b.count; ++n) w.number(b.mu[n].real());
    w.end_array();
    w.key("mu_im");
    w.begin_array();
    for (int n = 0; n < b.count; ++n) w.number(b.mu[n].imag());
    w.end_array();
    w.key("coeffs");
    w.begin_array();
    for (int n = 0; n < b.count; ++n) w.number_array(b.coeffs[n]);
    w.end_array();
    w.key("scale"); w.number_array(b.scale);
    w.end_object();
    return w.str() + "\n";
}

/// Rehydrate a basis from JSON. The evaluation caches are rebuilt with the
/// given quadrature order.
inline PswfBasis basis_from_json(const std::string& text, int quad_order = 200) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw validation_error(std::string("basis JSON parse error: ") + e.what());
    }
    PswfBasis b;
    b.spec = BandTimeSpec(j.at("T").get<double>(), j.at("W").get<double>());
    b.count = j.at("N").get<int>();
    auto vec = [&](const char* k) {
        const auto& a = j.at(k);
        Eigen::VectorXd v(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
        return v;
    };
    b.chi = vec("chi");
    b.lambda = vec("lambda");
    b.gamma = vec("gamma");
    b.one_minus_gamma = vec("one_minus_gamma");
    b.scale = vec("scale");
    const Eigen::VectorXd mr = vec("mu_re"), mi = vec("mu_im");
    b.mu.resize(b.count);
    for (int n = 0; n < b.count; ++n) b.mu[n] = {mr[n], mi[n]};
    b.coeffs.resize(b.count);
    const auto& cc = j.at("coeffs");
    for (int n = 0; n < b.count; ++n) {
        Eigen::VectorXd v(cc[n].size());
        for (std::size_t i = 0; i < cc[n].size(); ++i) v[i] = cc[n][i].get<double>();
        b.coeffs[n] = v;
    }
    const QuadRule rule = composite_gauss_legendre(-1.0, 1.0, 2, quad_order);
    b.zq = rule.nodes;
    b.zw = rule.weights;
    b.S_q.resize(rule.size(), b.count);
    b.dS_q.resize(rule.size(), b.count);
    b.max_abs_S.resize(b.count);
    for (int n = 0; n < b.count; ++n) {
        for (Eigen::Index i = 0; i < rule.size(); ++i) {
            b.S_q(i, n) = detail::legendre_series(b.coeffs[n], b.zq[i]);
            b.dS_q(i, n) = detail::legendre_series_deriv(b.coeffs[n], b.zq[i]);
        }
        b.max_abs_S[n] = b.S_q.col(n).cwiseAbs().maxCoeff();
    }
    return b;
}

// --- CSV -------------------------------------------------------------------

/// Signal CSV: header "t,re,im", one sample per line.
inline std::string signal_to_csv(const SampledSignal& s) {
    std::ostringstream out;
    out << "t,re,im\n";
    for (Eigen::Index i = 0; i < s.times.size(); ++i)
        out << fmt(s.times[i]) << ',' << fmt(s.values[i].real()) << ','
            << fmt(s.values[i].imag()) << '\n';
    return out.str();
}

inline SampledSignal signal_from_csv(const std::string& text) {
    SampledSignal s;
    std::istringstream in(text);
    std::string line;
    std::vector<double> t;
    std::vector<std::complex<double>> v;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (lineno == 1) {
            if (line != "t,re,im" && line != "t,re,im\r")
                throw validation_error("signal CSV line 1: expected header 't,re,im'");
            continue;
        }
        double a, b, c;
        if (std::sscanf(line.c_str(), "%lg,%lg,%lg", &a, &b, &c) != 3)
            throw validation_error("signal CSV line " + std::to_string(lineno) +
                                   ": expected 't,re,im' numbers, got '" + line + "'");
        if (!t.empty() && a <= t.back())
            throw validation_error("signal CSV line " + std::to_string(lineno) +
                                   ": time stamps must be strictly increasing");
        t.push_back(a);
        v.emplace_back(b, c);
    }
    if (t.size() < 2) throw validation_error("signal CSV: need at least two samples");
    s.times = Eigen::Map<Eigen::VectorXd>(t.data(), t.size());
    s.values = Eigen::Map<Eigen::VectorXcd>(v.data(), v.size());
    return s;
}

/// Sample-grid CSV: header "k,re,im" with integer Nyquist indices.
inline std::string grid_to_csv(const SampleGrid& g) {
    std::ostringstream out;
    out << "k,re,im\n";
    for (int k = g.k_min; k <= g.k_max; ++k)
        out << k << ',' << fmt(g.value(k).real()) << ',' << fmt(g.value(k).imag()) << '\n';
    return out.str();
}

inline SampleGrid grid_from_csv(const std::string& text, double W) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::pair<long, std::complex<double>>> rows;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (lineno == 1) {
            if (line != "k,re,im" && line != "k,re,im\r")
                throw validation_error("grid CSV line 1: expected header 'k,re,im'");
            continue;
        }
        long k;
        double re, im;
        if (std::sscanf(line.c_str(), "%ld,%lg,%lg", &k, &re, &im) != 3)
            throw validation_error("grid CSV line " + std::to_string(lineno) +
                                   ": expected 'k,re,im', got '" + line + "'");
        rows.emplace_back(k, std::complex<double>(re, im));
    }
    if (rows.empty()) throw validation_error("grid CSV: no samples");
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    SampleGrid g;
    g.W = W;
    g.k_min = static_cast<int>(rows.front().first);
    g.k_max = static_cast<int>(rows.back().first);
    if (static_cast<std::size_t>(g.size()) != rows.size())
        throw validation_error("grid CSV: sample indices must be contiguous");
    g.values.resize(g.size());
    for (std::size_t i = 0; i < rows.size(); ++i) g.values[i] = rows[i].second;
    return g;
}

// --- model / plan / result JSON ---------------------------------------------

/// Tone model JSON: {"tones": [{"omega": ..., "amplitude": ...}, ...]},
/// amplitudes being the powers |a_k|^2.
inline DiscreteSignal model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw validation_error(std::string("model JSON parse error: ") + e.what());
    }
    std::vector<double> w, a;
    for (const auto& tone : j.at("tones")) {
        w.push_back(tone.at("omega").get<double>());
        a.push_back(tone.at("amplitude").get<double>());
    }
    return DiscreteSignal(w, a);
}

inline std::string model_to_json(const DiscreteSignal& m) {
    JsonWriter w;
    w.begin_object();
    w.key("tones");
    w.begin_array();
    for (std::size_t k = 0; k < m.omegas.size(); ++k) {
        w.begin_object();
        w.key("omega"); w.number(m.omegas[k]);
        w.key("amplitude"); w.number(m.amps[k]);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str() + "\n";
}

/// Band-plan JSON for the analyze command.
struct BandPlan {
    double T = 1.0;
    int N = 8;            // basis size
    int quad_order = 200;
    int M = 4;            // filters per band
    unsigned long seed = 0;
    std::vector<Band> bands;
    double half_width = 0.0;
};

inline BandPlan plan_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw validation_error(std::string("plan JSON parse error: ") + e.what());
    }
    BandPlan p;
    p.T = j.at("T").get<double>();
    p.M = j.at("M").get<int>();
    p.N = j.value("N", std::max(p.M + 4, 8));
    p.quad_order = j.value("quad_order", 200);
    p.seed = j.value("seed", 0UL);
    for (const auto& b : j.at("bands")) {
        Band band;
        band.omega_center = b.at("omega_center").get<double>();
        band.half_width = b.at("half_width").get<double>();
        p.bands.push_back(band);
    }
    if (p.bands.empty()) throw validation_error("plan JSON: no bands");
    p.half_width = p.bands.front().half_width;
    for (const auto& b : p.bands)
        if (b.half_width != p.half_width)
            throw validation_error("plan JSON: all bands must share one half_width "
                                   "(c = W T is fixed per basis)");
    return p;
}

/// FdResult list -> analyze output JSON. Unavailable bounds become null with
/// a reason string; no NaN ever reaches the wire.
inline std::string results_to_json(const std::vector<FdResult>& results) {
    JsonWriter w;
    w.begin_object();
    w.key("bands");
    w.begin_array();
    for (const auto& r : results) {
        w.begin_object();
        w.key("omega_center"); w.number(r.omega_center);
        w.key("half_width"); w.number(r.half_width);
        w.key("m_detect"); w.integer(r.m_detect);
        w.key("epsilon_M"); w.number(r.epsilon_M);
        w.key("lambda_m"); w.number(r.lam_m_gram);
        if (!r.bounds_available || !r.bounds_reason.empty()) {
            w.key("reason");
            w.string(r.bounds_reason);
        }
        w.key("frequencies");
        w.begin_array();
        for (std::size_t k = 0; k < r.omegas_est.size(); ++k) {
            w.begin_object();
            w.key("omega"); w.number(r.omegas_est[k]);
            w.key("amplitude");
            std::isfinite(r.amps_est[k]) ? w.number(r.amps_est[k]) : w.null();
            w.key("lower");
            std::isfinite(r.freq_lower[k]) ? w.number(r.freq_lower[k]) : w.null();
            w.key("upper");
            std::isfinite(r.freq_upper[k]) ? w.number(r.freq_upper[k]) : w.null();
            w.key("amp_radius");
            std::isfinite(r.amp_radius[k]) ? w.number(r.amp_radius[k]) : w.null();
            w.key("detectability"); w.number(r.detectabilities[k]);
            w.end_object();
        }
        w.end_array();
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str() + "\n";
}

} // namespace io
} // namespace prolate

#endif
