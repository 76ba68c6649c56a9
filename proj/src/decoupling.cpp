// SPDX-License-Identifier: Apache-2.0
#include "icn/decoupling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "icn/constants.hpp"
#include "icn/errors.hpp"
#include "icn/format.hpp"

namespace icn::decoupling {

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

std::string ch_name(int ch, const std::string& local) { return "ch" + std::to_string(ch + 1) + "." + local; }

}  // namespace

void ChannelConfig::validate() const {
    if (!(f_r > 0.0)) throw DomainError("channel: resonance frequency must be positive");
    if (!(L_Tx > 0.0) || !(L2 > 0.0)) throw DomainError("channel: L_Tx and L2 must be positive");
    if (!(R_Tx >= 0.0) || !(R2 >= 0.0)) throw DomainError("channel: resistances must be non-negative");
    if (!(R_Tx + R2 > 0.0)) throw DomainError("channel: loop resistance must be positive");
    two_port.validate();
}

ChannelConfig make_channel(const magnetics::TwoPortParams& icn, double L_Tx, double R_Tx) {
    ChannelConfig c;
    c.f_r = icn.f;
    c.L_Tx = L_Tx;
    c.R_Tx = R_Tx;
    c.L2 = icn.L2;
    c.R2 = icn.R2;
    c.two_port = icn;
    c.validate();
    return c;
}

double mutual_between(const ChannelConfig& a, const ChannelConfig& b, double k_inter) {
    if (!(std::abs(k_inter) < 1.0)) throw DomainError("inter-channel coupling must lie in (-1, 1)");
    return k_inter * std::sqrt(a.L_Tx * b.L_Tx);
}

CoupledRatio coupled_current_ratio(const ChannelConfig& ch1, const ChannelConfig& ch2, double k_inter) {
    ch1.validate();
    ch2.validate();
    const double w1 = angular(ch1.f_r), w2 = angular(ch2.f_r);
    const double dw = std::abs(w2 - w1);
    if (dw == 0.0) throw DomainError("coupled current ratio: channel frequencies coincide (degenerate)");
    CoupledRatio r;
    if (std::abs(ch2.L_Tx - ch2.L2) > 0.25 * ch2.L2)
        r.warnings.push_back(fmt("victim channel is not matched: L_Tx = %.4g uH vs L2 = %.4g uH", ch2.L_Tx * 1e6,
                                 ch2.L2 * 1e6));
    if (dw / w1 > 0.05) r.warnings.push_back(fmt("channel spacing dw/w = %.3g exceeds 0.05", dw / w1));
    const double M = std::abs(mutual_between(ch1, ch2, k_inter));
    r.closed_form = w1 / (4.0 * dw) * std::abs(k_inter);
    r.step1 = w1 * M / (2.0 * dw * ch2.loop_inductance());
    const auto z = detuned_impedance(ch2, w1 - w2).exact;
    r.exact = w1 * M / std::abs(z);
    return r;
}

DetunedImpedance detuned_impedance(const ChannelConfig& ch, double dw) {
    ch.validate();
    const double w2 = angular(ch.f_r);
    if (!(std::abs(dw) < 0.1 * w2)) throw DomainError("detuned impedance: |dw| must stay below 0.1 w2");
    const double L = ch.loop_inductance(), rs = ch.series_resistance();
    const double w = w2 + dw;
    DetunedImpedance d;
    d.Q = w2 * L / rs;
    // series C tuned at w2: 1/(w C) = w2^2 L / w
    d.exact = {rs, w * L - w2 * w2 * L / w};
    d.first_order = rs * std::complex<double>(1.0, 2.0 * dw / w2 * d.Q);
    d.simplified = {0.0, 2.0 * dw * L};
    return d;
}

double common_capacitor(const ChannelConfig& ch1, const ChannelConfig& ch2, double k_inter) {
    if (!(k_inter > 0.0))
        throw SignError(fmt("common capacitor needs a positive inter-channel coupling (k = %.4g); "
                            "use an inductive scheme instead",
                            k_inter));
    const double M = mutual_between(ch1, ch2, k_inter);
    const double wd = kPi * (ch1.f_r + ch2.f_r);
    return 1.0 / (wd * wd * M);
}

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::none: return "none";
        case Scheme::common_capacitor: return "common_capacitor";
        case Scheme::per_channel_capacitors: return "per_channel_capacitors";
        case Scheme::series_inductive: return "series_inductive";
        case Scheme::separate_winding: return "separate_winding";
    }
    return "none";
}

Scheme scheme_from_string(const std::string& s) {
    for (auto v : {Scheme::none, Scheme::common_capacitor, Scheme::per_channel_capacitors, Scheme::series_inductive,
                   Scheme::separate_winding})
        if (to_string(v) == s) return v;
    throw DomainError("unknown decoupling scheme '" + s + "'");
}

namespace {

void check_system(const std::vector<ChannelConfig>& channels, const Eigen::MatrixXd& k) {
    const int n = static_cast<int>(channels.size());
    if (n < 2 || n > 3) throw DomainError("coupled system: 2 or 3 channels are supported");
    if (k.rows() != n || k.cols() != n) throw DomainError("coupled system: k matrix must be n x n");
    for (const auto& c : channels) c.validate();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (std::abs(k(i, j) - k(j, i)) > 1e-12) throw DomainError("coupled system: k matrix must be symmetric");
            if (!(std::abs(k(i, j)) < 1.0)) throw DomainError("coupled system: |k| must stay below 1");
            if (channels[i].f_r == channels[j].f_r) throw DomainError("coupled system: channel frequencies must differ");
        }
}

void require_same_sign(const Eigen::MatrixXd& k) {
    const int n = static_cast<int>(k.rows());
    bool pos = false, neg = false;
    std::string list;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (k(i, j) > 0.0) pos = true;
            if (k(i, j) < 0.0) neg = true;
            list += fmt(" k%.0f%.0f = %.4g", i + 1.0, j + 1.0, k(i, j));
        }
    if (pos && neg)
        throw TopologyError("capacitive decoupling cannot cancel couplings of mixed sign (sign conflict:" + list + ")");
    if (!pos) throw SignError("capacitive decoupling needs positive couplings (" + list.substr(1) + ")");
}

}  // namespace

DecouplingDesign design(const std::vector<ChannelConfig>& channels, const Eigen::MatrixXd& k, Scheme scheme) {
    check_system(channels, k);
    const int n = static_cast<int>(channels.size());
    DecouplingDesign d;
    d.scheme = scheme;
    switch (scheme) {
        case Scheme::none: break;
        case Scheme::common_capacitor: {
            require_same_sign(k);
            double msum = 0.0, mmin = 1e300, mmax = 0.0, fsum = 0.0, isum = 0.0;
            for (int i = 0; i < n; ++i) {
                fsum += channels[i].f_r;
                isum += channels[i].i_r;
                for (int j = i + 1; j < n; ++j) {
                    const double m = mutual_between(channels[i], channels[j], k(i, j));
                    msum += m;
                    mmin = std::min(mmin, m);
                    mmax = std::max(mmax, m);
                }
            }
            const int pairs = n * (n - 1) / 2;
            const double M = msum / pairs;
            const double wd = 2.0 * kPi * fsum / n;
            if (n > 2 && (mmax - mmin) > 0.2 * M)
                d.warnings.push_back(fmt("inter-channel mutuals spread by %.1f%% (> 20%%); one common capacitor "
                                         "cannot cancel all pairs",
                                         100.0 * (mmax - mmin) / M));
            d.elements.push_back({-1, -1, M, 1.0 / (wd * wd * M), wd});
            d.capacitor_current = isum;
            break;
        }
        case Scheme::per_channel_capacitors: {
            require_same_sign(k);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    const double wd = kPi * (channels[i].f_r + channels[j].f_r);
                    d.elements.push_back({i, j, mutual_between(channels[i], channels[j], k(i, j)),
                                          common_capacitor(channels[i], channels[j], k(i, j)), wd});
                    d.capacitor_current = std::max(d.capacitor_current, channels[i].i_r + channels[j].i_r);
                }
            break;
        }
        case Scheme::series_inductive:
        case Scheme::separate_winding: {
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    const double m = mutual_between(channels[i], channels[j], k(i, j));
                    if (m != 0.0) d.elements.push_back({i, j, m, m, 0.0});
                }
            break;
        }
    }
    return d;
}

std::string CoupledSystem::source(int ch) { return ch_name(ch, "V1"); }
std::string CoupledSystem::coil(int ch) { return ch_name(ch, "LTx"); }

namespace {

struct LoopBuilder {
    circuit::Netlist& net;
    int ch;
    int counter = 0;

    std::string fresh() {
        const auto n = ch_name(ch, "n" + std::to_string(counter++));
        net.add_node(n);
        return n;
    }
    // Place elements in series from node `from` to node `to`.
    void chain(const std::string& from, const std::string& to, const std::vector<circuit::Element>& parts) {
        std::string at = from;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const std::string next = i + 1 == parts.size() ? to : fresh();
            auto e = parts[i];
            e.a = at;
            e.b = next;
            net.add(e);
            at = next;
        }
    }
};

circuit::Element make(circuit::ElementKind kind, const std::string& name, double value, double series_r = 0.0) {
    circuit::Element e;
    e.kind = kind;
    e.name = name;
    e.value = value;
    e.series_r = series_r;
    return e;
}

}  // namespace

CoupledSystem build_coupled_system(const std::vector<ChannelConfig>& channels, const Eigen::MatrixXd& k,
                                   const DecouplingDesign& design) {
    using circuit::ElementKind;
    check_system(channels, k);
    const int n = static_cast<int>(channels.size());
    const bool capacitive =
        design.scheme == Scheme::common_capacitor || design.scheme == Scheme::per_channel_capacitors;
    if (capacitive) require_same_sign(k);

    CoupledSystem sys;
    sys.channels = channels;
    sys.design = design;
    auto& net = sys.netlist;

    // extra series inductors per channel and the couplings they carry
    std::vector<std::vector<circuit::Element>> extras(n);
    std::vector<circuit::Element> couplings;
    std::vector<double> extra_l(n, 0.0);
    const double kc = design.comp_coupling;
    if (!(kc > 0.0 && kc < 1.0)) throw DomainError("compensating coupling must lie in (0, 1)");
    for (const auto& p : design.elements) {
        const double sign = p.M > 0.0 ? -1.0 : 1.0;
        const double m = std::abs(p.value);
        if (design.scheme == Scheme::series_inductive) {
            const double lc = m / kc;
            const auto ni = ch_name(p.i, "Lc" + std::to_string(p.j + 1));
            const auto nj = ch_name(p.j, "Lc" + std::to_string(p.i + 1));
            extras[p.i].push_back(make(ElementKind::inductor, ni, lc));
            extras[p.j].push_back(make(ElementKind::inductor, nj, lc));
            extra_l[p.i] += lc;
            extra_l[p.j] += lc;
            auto c = make(ElementKind::mutual, ch_name(p.i, "Kc" + std::to_string(p.j + 1)), sign * kc);
            c.a = ni;
            c.b = nj;
            couplings.push_back(c);
        } else if (design.scheme == Scheme::separate_winding) {
            // winding in loop j that picks up flux of channel i's coil
            const double lw = (m / kc) * (m / kc) / channels[p.i].L_Tx;
            const auto nw = ch_name(p.j, "Lw" + std::to_string(p.i + 1));
            extras[p.j].push_back(make(ElementKind::inductor, nw, lw));
            extra_l[p.j] += lw;
            auto c = make(ElementKind::mutual, ch_name(p.j, "Kw" + std::to_string(p.i + 1)), sign * kc);
            c.a = CoupledSystem::coil(p.i);
            c.b = nw;
            couplings.push_back(c);
        }
    }

    // shared capacitors: nodes and the channels that pass through each
    struct Shared {
        std::string a, b;
        std::vector<int> members;
        double C;
    };
    std::vector<Shared> shared;
    if (capacitive) {
        for (std::size_t s = 0; s < design.elements.size(); ++s) {
            const auto& p = design.elements[s];
            Shared sh;
            sh.a = "cd" + std::to_string(s + 1) + ".a";
            sh.b = "cd" + std::to_string(s + 1) + ".b";
            sh.C = p.value;
            if (p.i < 0) {
                for (int c = 0; c < n; ++c) sh.members.push_back(c);
            } else {
                sh.members = {p.i, p.j};
            }
            net.add_node(sh.a);
            net.add_node(sh.b);
            shared.push_back(sh);
        }
    }

    for (int c = 0; c < n; ++c) {
        const auto& ch = channels[c];
        const auto& tp = ch.two_port;
        const double w = angular(ch.f_r);
        // primary: source, matching capacitor, L1
        for (const char* node : {"p_in", "p_a", "p_ret"}) net.add_node(ch_name(c, node));
        net.voltage_source(CoupledSystem::source(c), ch_name(c, "p_in"), ch_name(c, "p_ret"), 1.0, ch.f_r);
        net.capacitor(ch_name(c, "Cm"), ch_name(c, "p_in"), ch_name(c, "p_a"), circuit::matching_capacitor_exact(tp.L1, ch.f_r));
        net.inductor(ch_name(c, "L1"), ch_name(c, "p_a"), ch_name(c, "p_ret"), tp.L1, tp.R1);

        // loop tuning accounts for compensating inductors and shared capacitors
        double inv_c = w * w * (ch.loop_inductance() + extra_l[c]);
        std::vector<const Shared*> mine;
        for (const auto& sh : shared)
            if (std::find(sh.members.begin(), sh.members.end(), c) != sh.members.end()) {
                mine.push_back(&sh);
                inv_c -= 1.0 / sh.C;
            }
        if (!(inv_c > 0.0))
            throw StructuralError("channel " + std::to_string(c + 1) + ": shared capacitance leaves no room to tune the loop");
        const double c_own = 2.0 / inv_c;  // each of the two banks

        std::vector<circuit::Element> first = {make(ElementKind::inductor, ch_name(c, "L2"), ch.L2, ch.R2),
                                               make(ElementKind::capacitor, ch_name(c, "C1"), c_own)};
        std::vector<circuit::Element> second = {make(ElementKind::inductor, CoupledSystem::coil(c), ch.L_Tx, ch.R_Tx)};
        for (const auto& e : extras[c]) second.push_back(e);
        second.push_back(make(ElementKind::capacitor, ch_name(c, "C2"), c_own));

        LoopBuilder lb{net, c};
        if (mine.empty()) {
            const auto start = lb.fresh();
            auto all = first;
            all.insert(all.end(), second.begin(), second.end());
            lb.chain(start, start, all);
        } else if (mine.size() == 1) {
            auto all = first;
            all.insert(all.end(), second.begin(), second.end());
            lb.chain(mine[0]->b, mine[0]->a, all);
        } else {
            lb.chain(mine[0]->b, mine[1]->a, first);
            lb.chain(mine[1]->b, mine[0]->a, second);
        }
        auto icn = make(ElementKind::mutual, ch_name(c, "K12"), tp.M / std::sqrt(tp.L1 * tp.L2));
        icn.a = ch_name(c, "L1");
        icn.b = ch_name(c, "L2");
        if (icn.value != 0.0) net.add(icn);
    }
    for (std::size_t s = 0; s < shared.size(); ++s) net.capacitor("C_D" + std::to_string(s + 1), shared[s].a, shared[s].b, shared[s].C);

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (k(i, j) != 0.0) net.mutual("K_" + std::to_string(i + 1) + std::to_string(j + 1), CoupledSystem::coil(i), CoupledSystem::coil(j), k(i, j));
    for (const auto& c : couplings) net.add(c);
    net.validate();
    return sys;
}

double crosstalk_ratio(const CoupledSystem& sys, int aggressor, double f, PrimaryTermination victims) {
    const int n = static_cast<int>(sys.channels.size());
    if (aggressor < 0 || aggressor >= n) throw DomainError("aggressor channel out of range");
    circuit::Netlist net = sys.netlist;
    for (int c = 0; c < n; ++c) {
        if (c == aggressor) continue;
        net = victims == PrimaryTermination::open ? net.without_source(CoupledSystem::source(c))
                                                  : net.with_source(CoupledSystem::source(c), 0.0);
    }
    const auto sol = circuit::solve_ac(net, f);
    const double ia = std::abs(sol.current(CoupledSystem::coil(aggressor)));
    double worst = 0.0;
    for (int c = 0; c < n; ++c)
        if (c != aggressor) worst = std::max(worst, std::abs(sol.current(CoupledSystem::coil(c))));
    return worst / ia;
}

std::vector<Suppression> verify_suppression(const CoupledSystem& with_scheme, const CoupledSystem& without_scheme,
                                            PrimaryTermination victims) {
    if (with_scheme.channels.size() != without_scheme.channels.size())
        throw DomainError("suppression: systems have different channel counts");
    std::vector<Suppression> out;
    for (std::size_t a = 0; a < with_scheme.channels.size(); ++a) {
        Suppression s;
        s.aggressor = static_cast<int>(a);
        s.frequency = with_scheme.channels[a].f_r;
        s.ratio_with = crosstalk_ratio(with_scheme, s.aggressor, s.frequency, victims);
        s.ratio_without = crosstalk_ratio(without_scheme, s.aggressor, s.frequency, victims);
        s.improvement_db = 20.0 * std::log10(s.ratio_without / s.ratio_with);
        s.absolute_db = 20.0 * std::log10(s.ratio_with);
        out.push_back(s);
    }
    return out;
}

std::string victim_sweep_csv(const CoupledSystem& sys, int aggressor, const std::vector<double>& frequencies,
                             PrimaryTermination victims) {
    std::string out = "f_Hz,victim_over_aggressor\n";
    for (double f : frequencies)
        out += format::sci9(f) + "," + format::sci9(crosstalk_ratio(sys, aggressor, f, victims)) + "\n";
    return out;
}

}  // namespace icn::decoupling
