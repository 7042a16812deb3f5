#ifndef REEBLAB_MEASURES_HPP
#define REEBLAB_MEASURES_HPP

#include <array>
#include <complex>
#include <functional>
#include <memory>

#include "reeblab/blowup.hpp"

#include <json.hpp>

namespace reeblab {

// Convex combination of period-normalized arc-length measures on periodic
// orbits.
struct WeightedOrbitMeasure {
    std::vector<std::pair<PeriodicOrbit, double>> atoms;
    // weights in (0,1], summing to 1 within 1e-12
    void validate() const;
};

// A finite piece of trajectory used as an approximate invariant measure; the
// recorded closing length is the chord from the endpoint back to the start.
struct BirkhoffSegment {
    Vec start;
    double duration = 0;
    double closing_length = 0;
};

BirkhoffSegment make_birkhoff_segment(const ContactManifold& M, const Vec& start,
                                      double duration, double tol = 1e-9);

// One component h_k of a link L on a sphere-type model, together with its
// tubular frame and the unitary U_k of C^2 sending the component into the
// coordinate circle {z2 = 0}. The angle form of the component is
// d arg((U_k z)_2) / 2pi, the linking dual of h_k.
struct LinkComponent {
    PeriodicOrbit orbit;
    TubularFrame frame;
    Eigen::Matrix2cd U;
};

LinkComponent make_link_component(const ContactManifold& M, const PeriodicOrbit& orbit);

// A closed 1-form representative y = sum_k c_k * d arg((U_k z)_2) / 2pi on
// M \ L, carrying the torus coefficients (p_k, q_k) of its restriction to
// each blow-up torus, measured relative to the component's closed frame.
class CohomologyClass {
public:
    std::shared_ptr<const std::vector<LinkComponent>> link;
    Vec coeffs;
    std::vector<std::pair<double, double>> per_component;

    double beta(const Vec& p, const Vec& v) const;
    double iota_X(const ContactManifold& M, const Vec& p) const;

    // Integrals of beta along polylines, computed as exact winding sums of
    // the component angles (steps must subtend less than pi each).
    double loop_integral(const std::vector<Vec>& loop) const;
    double path_integral(const std::vector<Vec>& path) const;

    // Integral along the projected chord from a to b, with recursive
    // midpoint refinement of angle steps; the backbone of pr-map evaluation.
    double segment_integral_refined(const ContactManifold& M, const Vec& a, const Vec& b,
                                    int max_depth = 40) const;

    // Proxy distance to the link: min_k |(U_k z)_2|.
    double distance_to_link(const Vec& p) const;

    CohomologyClass scaled(double s) const;
};

// Builds the class with coefficients c_k on the component angle forms and
// measures (p_k, q_k) by meridian/longitude winding quadrature at the given
// tube radius.
CohomologyClass make_linking_class(const ContactManifold& M,
                                   std::shared_ptr<const std::vector<LinkComponent>> link,
                                   const Vec& coeffs, double tube_radius = 0.05);

// ---------------------------------------------------------------------------
// Integrals against measures

double measure_integral(const WeightedOrbitMeasure& mu,
                        const std::function<double(const Vec&)>& f);

double birkhoff_integral(const ContactManifold& M, const BirkhoffSegment& seg,
                         const std::function<double(const Vec&)>& f, double tol = 1e-9);

// mu . y = int iota_X beta dmu. Orbit atoms use exact winding sums; Birkhoff
// segments integrate iota_X beta along the trajectory. Support closer to the
// link than min_link_distance is rejected (beta undefined on L).
double measure_intersection(const ContactManifold& M, const WeightedOrbitMeasure& mu,
                            const CohomologyClass& y, double min_link_distance = 1e-2);
double measure_intersection(const ContactManifold& M, const BirkhoffSegment& seg,
                            const CohomologyClass& y, double min_link_distance = 1e-2);

// Boundary-torus shortcut: the uniform invariant measure on the blow-up
// torus of the framed orbit, paired with a class of torus coefficients
// (p, q), by long-time quadrature of p + q b(t, theta(t)).
double torus_measure_intersection(const TubularFrame& frame, double p, double q,
                                  double horizon);

// ---------------------------------------------------------------------------
// Seifert meshes and crossing counts

struct SeifertMesh {
    std::vector<Vec> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::pair<int, int>> boundary; // (link component index, multiplicity)
};

SeifertMesh mesh_from_json(const nlohmann::json& j);
nlohmann::json mesh_to_json(const SeifertMesh& mesh);

// Spanning disk of the Hopf fiber {z2 = 0} on the round sphere:
// (sqrt(1 - r^2) e^{i phi}, r), boundary at r = 0 with multiplicity 1.
SeifertMesh make_hopf_disk_mesh(int n_ang, int n_rad, bool flip_orientation = false);

// Reverses every triangle (orientation antisymmetry tests).
SeifertMesh reversed(const SeifertMesh& mesh);

// Splits every triangle at its edge midpoints (no reprojection).
SeifertMesh midpoint_subdivision(const SeifertMesh& mesh);

// Checks edge-orientation consistency and that the boundary cycles cover
// each declared link component with the declared multiplicity (winding of
// the component angle of the longitudinal coordinate). Throws on violation.
void validate_mesh(const SeifertMesh& mesh, const std::vector<LinkComponent>& link);

struct CrossingOptions {
    double cos_threshold = 1e-3;  // transversality cosine below this -> refine
    int base_segments = 128;      // orbit polyline resolution
    int max_refinements = 2;      // x4 density per refinement before erroring
    double w_bound = 0.05;        // allowed offset along the surface normal
    double min_boundary_distance = 5e-3;
};

// Signed count of transversal crossings of the orbit polyline with the mesh
// over one period; sign from the (normal-first) orientation convention.
int orbit_surface_intersection(const ContactManifold& M, const PeriodicOrbit& orbit,
                               const SeifertMesh& mesh, const CrossingOptions& opts = {});

// Per-triangle integral of the pullback of dlambda (exact for the constant-
// coefficient forms of the models).
double surface_dlambda_integral(const ContactManifold& M, const SeifertMesh& mesh);

// ---------------------------------------------------------------------------
// Reports

struct ActionLinkingRow {
    std::size_t n_atoms = 0;
    double measure_side = 0; // vol(lambda) * sum_j w_j int(gamma_j, S) / T_j
};

struct ActionLinkingReport {
    std::vector<ActionLinkingRow> rows;
    double surface_integral = 0; // int_S f* dlambda
    double target = 0;           // sum_k x_k T(h_k)
    double final_gap = 0;        // |last row - target|
};

ActionLinkingReport action_linking_report(const ContactManifold& M,
                                          const std::vector<WeightedOrbitMeasure>& mu_seq,
                                          const SeifertMesh& mesh,
                                          const std::vector<LinkComponent>& link,
                                          double contact_volume,
                                          const CrossingOptions& opts = {});

struct WeakstarRow {
    std::size_t n_atoms = 0;
    int f_index = 0;
    double mu_value = 0;
    double target = 0;
    double error = 0;
};

std::vector<WeakstarRow> weakstar_report(const std::vector<WeightedOrbitMeasure>& mu_seq,
                                         const std::vector<std::function<double(const Vec&)>>& fs,
                                         const std::vector<double>& targets);

// Seeded Monte-Carlo integral of f against the normalized Liouville measure
// lambda ^ dlambda / vol(lambda).
double liouville_integral(const ContactManifold& M, const std::function<double(const Vec&)>& f,
                          long n_samples, std::uint64_t seed);

// n uniformly seeded closed-form fibers with equal weights (round sphere and
// coordinate-flow ellipsoids).
WeightedOrbitMeasure uniform_fiber_measure(const EllipsoidModel& S, int n, std::uint64_t seed,
                                           int n_samples = 256);

} // namespace reeblab

#endif
