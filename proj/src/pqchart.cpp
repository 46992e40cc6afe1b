#include "doe/pqchart.hpp"

#include <cmath>
#include <numbers>

#include "doe/csvio.hpp"
#include "json.hpp"

namespace doe {

void PQConstraints::validate() const {
    if (pf_limit && !(*pf_limit > 0 && *pf_limit <= 1))
        throw InputError("pf_limit must be in (0,1]");
    if (s_max && !(*s_max > 0)) throw InputError("s_max must be > 0");
    if (disc_vertices < 3) throw InputError("disc_vertices must be >= 3");
}

namespace {

constexpr double kGeomEps = 1e-12;
constexpr double kBoundaryTol = 1e-9;

// Half-plane a*p + b*q <= c.
struct HalfPlane {
    double a, b, c;
    double eval(const PQPoint& v) const { return a * v.p + b * v.q - c; }
};

// Sutherland-Hodgman step against a single half-plane. Preserves CCW order.
std::vector<PQPoint> clip(const std::vector<PQPoint>& poly, const HalfPlane& h) {
    std::vector<PQPoint> out;
    const std::size_t n = poly.size();
    if (n == 0) return out;
    for (std::size_t i = 0; i < n; ++i) {
        const PQPoint& cur = poly[i];
        const PQPoint& nxt = poly[(i + 1) % n];
        double dc = h.eval(cur);
        double dn = h.eval(nxt);
        bool cur_in = dc <= kGeomEps;
        bool nxt_in = dn <= kGeomEps;
        if (cur_in) out.push_back(cur);
        if (cur_in != nxt_in) {
            double t = dc / (dc - dn);
            out.push_back({cur.p + t * (nxt.p - cur.p), cur.q + t * (nxt.q - cur.q)});
        }
    }
    return out;
}

std::vector<PQPoint> dedupe(std::vector<PQPoint> poly) {
    std::vector<PQPoint> out;
    for (const auto& v : poly) {
        if (!out.empty() && std::abs(v.p - out.back().p) < kGeomEps &&
            std::abs(v.q - out.back().q) < kGeomEps)
            continue;
        out.push_back(v);
    }
    while (out.size() > 1 && std::abs(out.front().p - out.back().p) < kGeomEps &&
           std::abs(out.front().q - out.back().q) < kGeomEps)
        out.pop_back();
    return out;
}

double piece_area(const std::vector<PQPoint>& poly) {
    double a = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& u = poly[i];
        const auto& v = poly[(i + 1) % n];
        a += u.p * v.q - v.p * u.q;
    }
    return 0.5 * a;
}

double point_segment_dist(const PQPoint& a, const PQPoint& b, double p, double q) {
    double dp = b.p - a.p, dq = b.q - a.q;
    double len2 = dp * dp + dq * dq;
    double t = len2 > 0 ? ((p - a.p) * dp + (q - a.q) * dq) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    double xp = a.p + t * dp - p, xq = a.q + t * dq - q;
    return std::hypot(xp, xq);
}

} // namespace

PQRegion build_region(const Envelope& p_env, const Envelope& q_env, const PQConstraints& c) {
    c.validate();
    PQRegion region;
    region.pieces.assign(4, {});
    if (p_env.empty || q_env.empty) return region;

    // CCW rectangle; may be degenerate (segment or point)
    const std::vector<PQPoint> rect = {{p_env.lower, q_env.lower},
                                       {p_env.upper, q_env.lower},
                                       {p_env.upper, q_env.upper},
                                       {p_env.lower, q_env.upper}};

    const double sp[4] = {1, -1, -1, 1};
    const double sq[4] = {1, 1, -1, -1};
    const double tan_phi = c.pf_limit ? std::tan(std::acos(*c.pf_limit)) : 0.0;

    for (int quad = 0; quad < 4; ++quad) {
        auto poly = rect;
        // restrict to the closed quadrant
        poly = clip(poly, {-sp[quad], 0.0, 0.0});
        poly = clip(poly, {0.0, -sq[quad], 0.0});
        // power-factor bowtie: |q| <= |p| * tan(acos(pf)); admits the origin
        if (c.pf_limit) poly = clip(poly, {-sp[quad] * tan_phi, sq[quad], 0.0});
        // inscribed regular polygon approximating the capacity disc
        if (c.s_max) {
            const int m = c.disc_vertices;
            const double apothem = *c.s_max * std::cos(std::numbers::pi / m);
            for (int k = 0; k < m && !poly.empty(); ++k) {
                double theta = (2.0 * k + 1.0) * std::numbers::pi / m;
                poly = clip(poly, {std::cos(theta), std::sin(theta), apothem});
            }
        }
        region.pieces[quad] = dedupe(std::move(poly));
        if (!region.pieces[quad].empty()) region.empty = false;
    }
    return region;
}

bool contains(const PQRegion& region, double p, double q) {
    for (const auto& piece : region.pieces) {
        if (piece.empty()) continue;
        if (piece.size() == 1) {
            if (std::hypot(p - piece[0].p, q - piece[0].q) <= kBoundaryTol) return true;
            continue;
        }
        if (std::abs(piece_area(piece)) < 1e-15) {
            // degenerate piece: point must lie on one of its segments
            for (std::size_t i = 0; i < piece.size(); ++i)
                if (point_segment_dist(piece[i], piece[(i + 1) % piece.size()], p, q) <=
                    kBoundaryTol)
                    return true;
            continue;
        }
        bool inside = true;
        for (std::size_t i = 0; i < piece.size(); ++i) {
            const auto& a = piece[i];
            const auto& b = piece[(i + 1) % piece.size()];
            double cross = (b.p - a.p) * (q - a.q) - (b.q - a.q) * (p - a.p);
            if (cross < -kBoundaryTol) {
                inside = false;
                break;
            }
        }
        if (inside) return true;
    }
    return false;
}

double area(const PQRegion& region) {
    double total = 0.0;
    for (const auto& piece : region.pieces)
        if (piece.size() >= 3) total += std::abs(piece_area(piece));
    return total;
}

void save_region(const PQRegion& region, const std::string& path) {
    nlohmann::json j;
    j["empty"] = region.empty;
    j["area"] = area(region);
    j["pieces"] = nlohmann::json::array();
    for (const auto& piece : region.pieces) {
        nlohmann::json jp = nlohmann::json::array();
        for (const auto& v : piece) jp.push_back({v.p, v.q});
        j["pieces"].push_back(jp);
    }
    auto out = csv::open_out(path);
    out << j.dump(2) << "\n";
}

void save_region_points(const PQRegion& region, const std::string& path) {
    auto out = csv::open_out(path);
    out << "piece,vertex_idx,p,q\n";
    for (std::size_t i = 0; i < region.pieces.size(); ++i)
        for (std::size_t k = 0; k < region.pieces[i].size(); ++k)
            out << i << "," << k << "," << csv::fmt(region.pieces[i][k].p) << ","
                << csv::fmt(region.pieces[i][k].q) << "\n";
}

} // namespace doe
