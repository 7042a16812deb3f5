#include "reeblab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace reeblab {

namespace {

using cplx = std::complex<double>;

Eigen::Vector2cd to_c2(const Vec& p) {
    return Eigen::Vector2cd(cplx(p(0), p(1)), cplx(p(2), p(3)));
}

// component angle variable: second coordinate after the component unitary
cplx angle_coord(const LinkComponent& comp, const Vec& p) {
    return (comp.U * to_c2(p))(1);
}

} // namespace

void WeightedOrbitMeasure::validate() const {
    double sum = 0;
    for (const auto& [orb, w] : atoms) {
        (void)orb;
        if (!(w > 0.0) || w > 1.0 + 1e-12)
            throw std::invalid_argument("orbit measure weight outside (0,1]");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("orbit measure weights do not sum to 1");
}

BirkhoffSegment make_birkhoff_segment(const ContactManifold& M, const Vec& start,
                                      double duration, double tol) {
    if (!(duration > 0)) throw std::invalid_argument("segment duration must be > 0");
    BirkhoffSegment seg;
    seg.start = start;
    seg.duration = duration;
    seg.closing_length = (flow(M, start, duration, tol) - start).norm();
    return seg;
}

LinkComponent make_link_component(const ContactManifold& M, const PeriodicOrbit& orbit) {
    if (M.ambient_dim() != 4)
        throw std::invalid_argument("link components require a sphere-type model");
    LinkComponent comp;
    comp.orbit = orbit;
    comp.frame = build_tubular_frame(M, orbit);
    Eigen::Vector2cd w = to_c2(orbit.base_point).normalized();
    comp.U << std::conj(w(0)), std::conj(w(1)), -w(1), w(0);
    return comp;
}

double CohomologyClass::beta(const Vec& p, const Vec& v) const {
    double total = 0;
    for (int k = 0; k < coeffs.size(); ++k) {
        if (coeffs(k) == 0.0) continue;
        const cplx g = angle_coord((*link)[k], p);
        const cplx gv = angle_coord((*link)[k], v);
        total += coeffs(k) * std::imag(std::conj(g) * gv) / (2.0 * M_PI * std::norm(g));
    }
    return total;
}

double CohomologyClass::iota_X(const ContactManifold& M, const Vec& p) const {
    return beta(p, M.reeb(p));
}

namespace {

double winding_sum(const LinkComponent& comp, const std::vector<Vec>& pts, bool closed) {
    double acc = 0;
    const std::size_t n = pts.size();
    cplx prev = angle_coord(comp, pts[0]);
    const std::size_t last = closed ? n : n - 1;
    for (std::size_t i = 1; i <= last; ++i) {
        cplx cur = angle_coord(comp, pts[i % n]);
        acc += std::arg(cur / prev); // principal increment, needs steps < pi
        prev = cur;
    }
    return acc;
}

} // namespace

double CohomologyClass::loop_integral(const std::vector<Vec>& loop) const {
    double total = 0;
    for (int k = 0; k < coeffs.size(); ++k)
        if (coeffs(k) != 0.0)
            total += coeffs(k) * winding_sum((*link)[k], loop, true) / (2.0 * M_PI);
    return total;
}

double CohomologyClass::path_integral(const std::vector<Vec>& path) const {
    double total = 0;
    for (int k = 0; k < coeffs.size(); ++k)
        if (coeffs(k) != 0.0)
            total += coeffs(k) * winding_sum((*link)[k], path, false) / (2.0 * M_PI);
    return total;
}

double CohomologyClass::segment_integral_refined(const ContactManifold& M, const Vec& a,
                                                 const Vec& b, int max_depth) const {
    // all component angle increments small enough for principal branches?
    bool small = true;
    for (int k = 0; k < coeffs.size() && small; ++k) {
        if (coeffs(k) == 0.0) continue;
        const cplx ga = angle_coord((*link)[k], a), gb = angle_coord((*link)[k], b);
        if (std::abs(std::arg(gb / ga)) > 0.5) small = false;
    }
    if (small || max_depth == 0) {
        double total = 0;
        for (int k = 0; k < coeffs.size(); ++k) {
            if (coeffs(k) == 0.0) continue;
            const cplx ga = angle_coord((*link)[k], a), gb = angle_coord((*link)[k], b);
            total += coeffs(k) * std::arg(gb / ga) / (2.0 * M_PI);
        }
        return total;
    }
    Vec mid = 0.5 * (a + b);
    if (mid.norm() < 1e-3) mid(0) += 1e-3; // antipodal chord guard
    mid = M.project(mid);
    return segment_integral_refined(M, a, mid, max_depth - 1) +
           segment_integral_refined(M, mid, b, max_depth - 1);
}

double CohomologyClass::distance_to_link(const Vec& p) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& comp : *link) d = std::min(d, std::abs(angle_coord(comp, p)));
    return d;
}

CohomologyClass CohomologyClass::scaled(double s) const {
    CohomologyClass y = *this;
    y.coeffs *= s;
    for (auto& [p, q] : y.per_component) {
        p *= s;
        q *= s;
    }
    return y;
}

CohomologyClass make_linking_class(const ContactManifold& M,
                                   std::shared_ptr<const std::vector<LinkComponent>> link,
                                   const Vec& coeffs, double tube_radius) {
    if (coeffs.size() != static_cast<int>(link->size()))
        throw std::invalid_argument("coefficient count must match link components");
    CohomologyClass y;
    y.link = link;
    y.coeffs = coeffs;

    const int n_nodes = 256;
    for (const auto& comp : *link) {
        const TubularFrame& F = comp.frame;
        // meridian around gamma(0): winds once in the frame's theta
        std::vector<Vec> meridian;
        meridian.reserve(n_nodes);
        for (int i = 0; i < n_nodes; ++i) {
            const double s = 2.0 * M_PI * i / n_nodes;
            meridian.push_back(M.project(F.points[0] + tube_radius * (std::cos(s) * F.e1[0] +
                                                                      std::sin(s) * F.e2[0])));
        }
        const double q = y.loop_integral(meridian) / (2.0 * M_PI);

        // longitude: push-off along e1 (theta = 0 on the torus)
        std::vector<Vec> longitude;
        longitude.reserve(F.n_grid);
        for (int k = 0; k < F.n_grid; ++k)
            longitude.push_back(M.project(F.points[k] + tube_radius * F.e1[k]));
        const double p = y.loop_integral(longitude) / comp.orbit.period;

        y.per_component.emplace_back(p, q);
    }
    return y;
}

// ---------------------------------------------------------------------------

double measure_integral(const WeightedOrbitMeasure& mu,
                        const std::function<double(const Vec&)>& f) {
    mu.validate();
    double total = 0;
    for (const auto& [orb, w] : mu.atoms) {
        double acc = 0;
        for (const Vec& p : orb.samples) acc += f(p);
        total += w * acc / orb.samples.size(); // periodic trapezoid = mean
    }
    return total;
}

double birkhoff_integral(const ContactManifold& M, const BirkhoffSegment& seg,
                         const std::function<double(const Vec&)>& f, double tol) {
    const int n = M.ambient_dim();
    Vec y0(n + 1);
    y0.head(n) = seg.start;
    y0(n) = 0;
    auto rhs = [&](double, const Vec& y) {
        Vec d(n + 1);
        Vec p = y.head(n);
        d.head(n) = M.reeb(p);
        d(n) = f(p);
        return d;
    };
    OdeOptions opts;
    opts.tol = tol;
    opts.post_step = [&](Vec& y) { y.head(n) = M.project(y.head(n)); };
    Vec yf = integrate_dopri5(rhs, y0, 0.0, seg.duration, opts);
    return yf(n) / seg.duration;
}

double measure_intersection(const ContactManifold& M, const WeightedOrbitMeasure& mu,
                            const CohomologyClass& y, double min_link_distance) {
    (void)M;
    mu.validate();
    double total = 0;
    for (const auto& [orb, w] : mu.atoms) {
        for (const Vec& p : orb.samples)
            if (y.distance_to_link(p) < min_link_distance)
                throw std::invalid_argument("measure support intersects the link");
        total += w * y.loop_integral(orb.samples) / orb.period;
    }
    return total;
}

double measure_intersection(const ContactManifold& M, const BirkhoffSegment& seg,
                            const CohomologyClass& y, double min_link_distance) {
    const int n = M.ambient_dim();
    Vec y0(n + 1);
    y0.head(n) = seg.start;
    y0(n) = 0;
    auto rhs = [&](double, const Vec& s) {
        Vec d(n + 1);
        Vec p = s.head(n);
        d.head(n) = M.reeb(p);
        d(n) = y.beta(p, M.reeb(p));
        return d;
    };
    OdeOptions opts;
    opts.post_step = [&](Vec& s) {
        Vec p = M.project(s.head(n));
        if (y.distance_to_link(p) < min_link_distance)
            throw std::invalid_argument("segment passes through the link tube");
        s.head(n) = p;
    };
    Vec yf = integrate_dopri5(rhs, y0, 0.0, seg.duration, opts);
    return yf(n) / seg.duration;
}

double torus_measure_intersection(const TubularFrame& frame, double p, double q,
                                  double horizon) {
    if (!(horizon > 0)) throw std::invalid_argument("horizon must be > 0");
    auto rhs = [&frame](double t, const Vec& y) {
        Vec d(1);
        d(0) = frame.b(t, y(0));
        return d;
    };
    OdeOptions opts;
    opts.tol = 1e-10;
    opts.h_max = 0.1;
    Vec th0(1);
    th0.setZero();
    Vec th = integrate_dopri5(rhs, th0, 0.0, horizon, opts);
    return p + q * (th(0) - th0(0)) / horizon;
}

// ---------------------------------------------------------------------------

SeifertMesh mesh_from_json(const nlohmann::json& j) {
    SeifertMesh m;
    for (const auto& v : j.at("vertices")) {
        Vec p(static_cast<int>(v.size()));
        for (int i = 0; i < p.size(); ++i) p(i) = v[i].get<double>();
        m.vertices.push_back(std::move(p));
    }
    for (const auto& t : j.at("triangles"))
        m.triangles.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
    for (const auto& b : j.at("boundary"))
        m.boundary.emplace_back(b.at("component").get<int>(), b.at("multiplicity").get<int>());
    return m;
}

nlohmann::json mesh_to_json(const SeifertMesh& mesh) {
    nlohmann::json j;
    j["vertices"] = nlohmann::json::array();
    for (const Vec& v : mesh.vertices) {
        nlohmann::json row = nlohmann::json::array();
        for (int i = 0; i < v.size(); ++i) row.push_back(v(i));
        j["vertices"].push_back(std::move(row));
    }
    j["triangles"] = nlohmann::json::array();
    for (const auto& t : mesh.triangles) j["triangles"].push_back({t[0], t[1], t[2]});
    j["boundary"] = nlohmann::json::array();
    for (const auto& [c, x] : mesh.boundary)
        j["boundary"].push_back({{"component", c}, {"multiplicity", x}});
    return j;
}

SeifertMesh make_hopf_disk_mesh(int n_ang, int n_rad, bool flip_orientation) {
    if (n_ang < 3 || n_rad < 1) throw std::invalid_argument("mesh resolution too small");
    SeifertMesh m;
    auto idx = [n_ang](int i, int j) { return i * n_ang + (j % n_ang); };
    for (int i = 0; i < n_rad; ++i) {
        const double r = static_cast<double>(i) / n_rad;
        const double s = std::sqrt(1.0 - r * r);
        for (int j = 0; j < n_ang; ++j) {
            const double phi = 2.0 * M_PI * j / n_ang;
            Vec v(4);
            v << s * std::cos(phi), s * std::sin(phi), r, 0.0;
            m.vertices.push_back(std::move(v));
        }
    }
    Vec apex(4);
    apex << 0, 0, 1, 0;
    m.vertices.push_back(apex);
    const int apex_idx = n_rad * n_ang;

    auto push = [&](int a, int b, int c) {
        if (flip_orientation) std::swap(b, c);
        m.triangles.push_back({a, b, c});
    };
    for (int i = 0; i + 1 < n_rad; ++i)
        for (int j = 0; j < n_ang; ++j) {
            push(idx(i, j), idx(i, j + 1), idx(i + 1, j + 1));
            push(idx(i, j), idx(i + 1, j + 1), idx(i + 1, j));
        }
    for (int j = 0; j < n_ang; ++j) push(idx(n_rad - 1, j), idx(n_rad - 1, j + 1), apex_idx);
    m.boundary.emplace_back(0, 1);
    return m;
}

SeifertMesh reversed(const SeifertMesh& mesh) {
    SeifertMesh r = mesh;
    for (auto& t : r.triangles) std::swap(t[1], t[2]);
    return r;
}

SeifertMesh midpoint_subdivision(const SeifertMesh& mesh) {
    SeifertMesh r;
    r.vertices = mesh.vertices;
    r.boundary = mesh.boundary;
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
        auto key = std::minmax(a, b);
        auto it = midpoint.find(key);
        if (it != midpoint.end()) return it->second;
        r.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
        int id = static_cast<int>(r.vertices.size()) - 1;
        midpoint[key] = id;
        return id;
    };
    for (const auto& t : mesh.triangles) {
        int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
        r.triangles.push_back({t[0], ab, ca});
        r.triangles.push_back({ab, t[1], bc});
        r.triangles.push_back({ca, bc, t[2]});
        r.triangles.push_back({ab, bc, ca});
    }
    return r;
}

void validate_mesh(const SeifertMesh& mesh, const std::vector<LinkComponent>& link) {
    // Edge-orientation consistency: interior edges appear exactly twice and
    // in opposite directions; the remaining directed edges form the boundary.
    std::map<std::pair<int, int>, int> undirected;
    std::map<int, int> boundary_next;
    std::map<std::pair<int, int>, int> directed;
    for (const auto& t : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            int a = t[e], b = t[(e + 1) % 3];
            undirected[std::minmax(a, b)]++;
            if (++directed[{a, b}] > 1)
                throw std::invalid_argument("mesh: repeated directed edge (orientation flip)");
        }
    std::vector<std::pair<int, int>> boundary_edges;
    for (const auto& [key, count] : undirected) {
        if (count > 2) throw std::invalid_argument("mesh: edge shared by > 2 triangles");
        if (count == 2) {
            if (!directed.count({key.first, key.second}) || !directed.count({key.second, key.first}))
                throw std::invalid_argument("mesh: inconsistent triangle orientations");
        } else {
            auto [a, b] = key;
            if (directed.count({a, b}))
                boundary_edges.emplace_back(a, b);
            else
                boundary_edges.emplace_back(b, a);
        }
    }
    for (const auto& [a, b] : boundary_edges) {
        if (boundary_next.count(a))
            throw std::invalid_argument("mesh: boundary is not a disjoint union of cycles");
        boundary_next[a] = b;
    }

    // Walk boundary cycles and accumulate the longitudinal winding around the
    // matched link component.
    std::vector<double> winding(link.size(), 0.0);
    std::map<int, bool> used;
    for (const auto& [start, next0] : boundary_next) {
        (void)next0;
        if (used.count(start)) continue;
        std::vector<int> cycle;
        int v = start;
        do {
            used[v] = true;
            cycle.push_back(v);
            auto it = boundary_next.find(v);
            if (it == boundary_next.end())
                throw std::invalid_argument("mesh: open boundary chain");
            v = it->second;
        } while (v != start);

        // nearest component to the cycle
        std::size_t best_k = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < link.size(); ++k) {
            for (const Vec& s : link[k].orbit.samples) {
                double d = (s - mesh.vertices[cycle[0]]).norm();
                if (d < best_d) {
                    best_d = d;
                    best_k = k;
                }
            }
        }
        // longitudinal coordinate along the component is arg((U z)_1)
        double acc = 0;
        cplx prev = (link[best_k].U * to_c2(mesh.vertices[cycle[0]]))(0);
        for (std::size_t i = 1; i <= cycle.size(); ++i) {
            cplx cur = (link[best_k].U * to_c2(mesh.vertices[cycle[i % cycle.size()]]))(0);
            acc += std::arg(cur / prev);
            prev = cur;
        }
        winding[best_k] += acc / (2.0 * M_PI);
    }

    for (const auto& [k, x] : mesh.boundary) {
        if (k < 0 || k >= static_cast<int>(link.size()))
            throw std::invalid_argument("mesh: boundary references unknown component");
        if (std::abs(winding[k] - x) > 1e-6)
            throw std::invalid_argument("mesh: boundary multiplicity mismatch on component " +
                                        std::to_string(k));
    }
}

// ---------------------------------------------------------------------------

namespace {

struct TrianglePatch {
    Vec A, E1, E2, nhat; // nhat empty for 3-d models
    Vec lo, hi;          // bounding box with margin
    double sign_aux = 0;
};

std::vector<TrianglePatch> build_patches(const ContactManifold& M, const SeifertMesh& mesh,
                                         double margin) {
    std::vector<TrianglePatch> patches;
    patches.reserve(mesh.triangles.size());
    const int n = M.ambient_dim();
    for (const auto& t : mesh.triangles) {
        TrianglePatch p;
        p.A = mesh.vertices[t[0]];
        p.E1 = mesh.vertices[t[1]] - p.A;
        p.E2 = mesh.vertices[t[2]] - p.A;
        if (M.constraint(p.A).has_value()) {
            Vec centroid = (mesh.vertices[t[0]] + mesh.vertices[t[1]] + mesh.vertices[t[2]]) / 3.0;
            p.nhat = M.constraint_grad(M.project(centroid)).normalized();
        }
        p.lo = Vec::Constant(n, std::numeric_limits<double>::infinity());
        p.hi = -p.lo;
        for (int c = 0; c < 3; ++c) {
            const Vec& v = mesh.vertices[t[c]];
            p.lo = p.lo.cwiseMin(v);
            p.hi = p.hi.cwiseMax(v);
        }
        p.lo.array() -= margin;
        p.hi.array() += margin;
        patches.push_back(std::move(p));
    }
    return patches;
}

// one near-crossing of a segment with a triangle slab: `violation` is 0 when
// the hit is strictly inside the thickened triangle and grows with the
// barycentric / lateral overshoot, so the least-violating candidate of a
// cluster identifies the facet actually crossed
struct CrossCandidate {
    bool tangential = false;
    bool valid = false;
    double s = 0;         // fraction along the segment
    double violation = 0; // max overshoot of the (u, v, w) slab conditions
    int sign = 0;
};

CrossCandidate segment_triangle(const ContactManifold& M, const Vec& P, const Vec& Q,
                                const TrianglePatch& tri, const CrossingOptions& opts) {
    CrossCandidate cand;
    const int n = M.ambient_dim();
    const Vec D = Q - P;
    Mat A(n, n);
    Vec rhs = tri.A - P;
    A.col(0) = D;
    A.col(1) = -tri.E1;
    A.col(2) = -tri.E2;
    if (n == 4) A.col(3) = -tri.nhat;
    Eigen::PartialPivLU<Mat> lu(A);
    Vec x = lu.solve(rhs);
    if (!x.allFinite()) return cand;
    const double s = x(0), u = x(1), v = x(2);
    const double w = (n == 4) ? x(3) : 0.0;

    // adjacent tilted facets leave small lateral gaps between their slabs, so
    // a crossing is accepted with a slack overshoot and deduplicated by the
    // caller (clustering by position along the orbit)
    const double slack = 0.05;
    if (!(s >= 0 && s < 1)) return cand;
    const double violation = std::max({0.0, -u, -v, u + v - 1.0,
                                       (std::abs(w) - opts.w_bound) / opts.w_bound});
    if (violation > slack) return cand;

    // transversality: component of the segment direction off the triangle's
    // 3-plane span(E1, E2, nhat) (span(E1, E2) for 3-d models)
    Mat B(n, n == 4 ? 3 : 2);
    B.col(0) = tri.E1.normalized();
    B.col(1) = (tri.E2 - B.col(0).dot(tri.E2) * B.col(0)).normalized();
    if (n == 4) {
        Vec nn = tri.nhat - B.col(0).dot(tri.nhat) * B.col(0) - B.col(1).dot(tri.nhat) * B.col(1);
        B.col(2) = nn.normalized();
    }
    Vec dn = D.normalized();
    const double cosine = (dn - B * (B.transpose() * dn)).norm();
    if (cosine < opts.cos_threshold) {
        cand.tangential = true;
        return cand;
    }

    double det;
    if (n == 4) {
        Mat o(4, 4);
        o.col(0) = tri.nhat;
        o.col(1) = D;
        o.col(2) = tri.E1;
        o.col(3) = tri.E2;
        det = o.determinant();
    } else {
        Mat o(3, 3);
        o.col(0) = D;
        o.col(1) = tri.E1;
        o.col(2) = tri.E2;
        det = o.determinant();
    }
    cand.valid = true;
    cand.s = s;
    cand.violation = violation;
    cand.sign = det > 0 ? 1 : -1;
    return cand;
}

} // namespace

int orbit_surface_intersection(const ContactManifold& M, const PeriodicOrbit& orbit,
                               const SeifertMesh& mesh, const CrossingOptions& opts) {
    // precondition: orbit stays away from the mesh boundary cycle vertices
    {
        std::map<std::pair<int, int>, int> undirected;
        for (const auto& t : mesh.triangles)
            for (int e = 0; e < 3; ++e) undirected[std::minmax(t[e], t[(e + 1) % 3])]++;
        for (const auto& [key, count] : undirected)
            if (count == 1)
                for (int vid : {key.first, key.second})
                    for (const Vec& s : orbit.samples)
                        if ((s - mesh.vertices[vid]).norm() < opts.min_boundary_distance)
                            throw std::invalid_argument(
                                "orbit too close to the mesh boundary");
    }

    auto patches = build_patches(M, mesh, opts.w_bound);
    const int n = M.ambient_dim();

    for (int refine = 0; refine <= opts.max_refinements; ++refine) {
        const int n_seg = opts.base_segments << (2 * refine);
        bool tangential = false;
        struct Hit {
            double t; // position along the orbit in period fractions
            double violation;
            int sign;
        };
        std::vector<Hit> hits;
        Vec prev = orbit.sample_at(0.0);
        for (int i = 0; i < n_seg && !tangential; ++i) {
            Vec cur = orbit.sample_at(orbit.period * (i + 1) / n_seg);
            Vec lo = prev.cwiseMin(cur), hi = prev.cwiseMax(cur);
            for (const auto& tri : patches) {
                bool reject = false;
                for (int c = 0; c < n; ++c)
                    if (lo(c) > tri.hi(c) || hi(c) < tri.lo(c)) {
                        reject = true;
                        break;
                    }
                if (reject) continue;
                const CrossCandidate cand = segment_triangle(M, prev, cur, tri, opts);
                if (cand.tangential) {
                    tangential = true;
                    break;
                }
                if (cand.valid) hits.push_back({(i + cand.s) / n_seg, cand.violation, cand.sign});
            }
            prev = std::move(cur);
        }
        if (tangential) continue;

        // one geometric crossing shows up as a cluster of candidates from
        // neighboring facet slabs; count each cluster once by its
        // least-violating representative
        std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.t < b.t; });
        const double cluster_gap = 1.5 / n_seg;
        // the positions are periodic: rotate so clustering starts after the
        // largest circular gap, then a linear pass cannot split a cluster
        if (hits.size() > 1) {
            std::size_t cut = 0;
            double widest = hits.front().t + 1.0 - hits.back().t;
            for (std::size_t k = 1; k < hits.size(); ++k)
                if (hits[k].t - hits[k - 1].t > widest) {
                    widest = hits[k].t - hits[k - 1].t;
                    cut = k;
                }
            std::rotate(hits.begin(), hits.begin() + cut, hits.end());
            for (std::size_t k = 1; k < hits.size(); ++k)
                if (hits[k].t < hits[k - 1].t) hits[k].t += 1.0;
        }
        int count = 0;
        std::size_t i = 0;
        while (i < hits.size()) {
            std::size_t j = i + 1;
            const Hit* best = &hits[i];
            while (j < hits.size() && hits[j].t - hits[j - 1].t < cluster_gap) {
                if (hits[j].violation < best->violation) best = &hits[j];
                ++j;
            }
            count += best->sign;
            i = j;
        }
        return count;
    }
    throw std::runtime_error("unresolved near-tangential crossing; refine the orbit sampling");
}

double surface_dlambda_integral(const ContactManifold& M, const SeifertMesh& mesh) {
    double total = 0;
    for (const auto& t : mesh.triangles) {
        const Vec& A = mesh.vertices[t[0]];
        const Vec E1 = mesh.vertices[t[1]] - A;
        const Vec E2 = mesh.vertices[t[2]] - A;
        total += 0.5 * M.dlambda(A, E1, E2); // exact: dlambda has constant coefficients
    }
    return total;
}

// ---------------------------------------------------------------------------

ActionLinkingReport action_linking_report(const ContactManifold& M,
                                          const std::vector<WeightedOrbitMeasure>& mu_seq,
                                          const SeifertMesh& mesh,
                                          const std::vector<LinkComponent>& link,
                                          double contact_volume,
                                          const CrossingOptions& opts) {
    ActionLinkingReport rep;
    for (const auto& [k, x] : mesh.boundary) rep.target += x * link[k].orbit.period;
    rep.surface_integral = surface_dlambda_integral(M, mesh);

    for (const auto& mu : mu_seq) {
        mu.validate();
        double acc = 0;
        for (const auto& [orb, w] : mu.atoms)
            acc += w * orbit_surface_intersection(M, orb, mesh, opts) / orb.period;
        rep.rows.push_back({mu.atoms.size(), contact_volume * acc});
    }
    if (!rep.rows.empty())
        rep.final_gap = std::abs(rep.rows.back().measure_side - rep.target);
    return rep;
}

std::vector<WeakstarRow> weakstar_report(const std::vector<WeightedOrbitMeasure>& mu_seq,
                                         const std::vector<std::function<double(const Vec&)>>& fs,
                                         const std::vector<double>& targets) {
    if (fs.size() != targets.size())
        throw std::invalid_argument("one target per test function required");
    std::vector<WeakstarRow> rows;
    for (const auto& mu : mu_seq)
        for (std::size_t i = 0; i < fs.size(); ++i) {
            WeakstarRow r;
            r.n_atoms = mu.atoms.size();
            r.f_index = static_cast<int>(i);
            r.mu_value = measure_integral(mu, fs[i]);
            r.target = targets[i];
            r.error = std::abs(r.mu_value - r.target);
            rows.push_back(r);
        }
    return rows;
}

double liouville_integral(const ContactManifold& M, const std::function<double(const Vec&)>& f,
                          long n_samples, std::uint64_t seed) {
    auto rng = make_rng(seed);
    if (const auto* E = dynamic_cast<const EllipsoidModel*>(&M)) {
        // importance sampling from the uniform sphere, weighted by the
        // contact-volume density (constant on the round sphere)
        const double sa = std::sqrt(E->a()), sb = std::sqrt(E->b());
        Vec scale(4);
        scale << sa, sa, sb, sb;
        EllipsoidModel sphere(1.0, 1.0, true);
        auto density = [&](const Vec& s) {
            Vec p = scale.asDiagonal() * s;
            Mat frame = sphere.oriented_tangent_frame(s);
            Vec w1 = scale.asDiagonal() * frame.col(0);
            Vec w2 = scale.asDiagonal() * frame.col(1);
            Vec w3 = scale.asDiagonal() * frame.col(2);
            return E->lambda(p, w1) * E->dlambda(p, w2, w3) -
                   E->lambda(p, w2) * E->dlambda(p, w1, w3) +
                   E->lambda(p, w3) * E->dlambda(p, w1, w2);
        };
        double num = 0, den = 0;
        for (long i = 0; i < n_samples; ++i) {
            Vec s = sphere.random_point(rng);
            const double d = density(s);
            num += f(scale.asDiagonal() * s) * d;
            den += d;
        }
        return num / den;
    }
    // box model: lambda ^ dlambda is the Euclidean volume, and random_point
    // samples it uniformly
    double acc = 0;
    for (long i = 0; i < n_samples; ++i) acc += f(M.random_point(rng));
    return acc / n_samples;
}

WeightedOrbitMeasure uniform_fiber_measure(const EllipsoidModel& S, int n, std::uint64_t seed,
                                           int n_samples) {
    if (S.a() != S.b())
        throw std::invalid_argument("uniform fibers require equal axes (periodic flow)");
    WeightedOrbitMeasure mu;
    auto rng = make_rng(seed);
    const double T = M_PI * S.a();
    for (int i = 0; i < n; ++i) {
        PeriodicOrbit orb;
        orb.base_point = S.random_point(rng);
        orb.period = T;
        orb.samples.reserve(n_samples);
        for (int k = 0; k < n_samples; ++k)
            orb.samples.push_back(S.exact_flow(orb.base_point, T * k / n_samples));
        mu.atoms.emplace_back(std::move(orb), 1.0 / n);
    }
    return mu;
}

} // namespace reeblab
