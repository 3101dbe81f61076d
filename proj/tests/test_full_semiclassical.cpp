#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mist/full_model.hpp"
#include "mist/semiclassical.hpp"

using namespace mist;

namespace {

FluxoniumSpec table1_spec() {
    FluxoniumSpec s;
    s.E_C_GHz = 0.795;
    s.E_J_GHz = 4.43;
    s.E_L_GHz = 0.89;
    s.phi_ext = two_pi * 0.010;
    s.ho_truncation = 120;
    return s;
}

const double omega_r = ghz_to_rad(5.9436);
const double kappa = mhz_to_rad(4.086);
const double g_coupling = ghz_to_rad(0.098);

FullSystem small_system(double g, double eps_mhz, Index n_max, Index j_max) {
    static const QubitSpectrum sp = diagonalize(table1_spec(), 4);
    return make_full_system(sp, omega_r, omega_r, g, kappa, mhz_to_rad(eps_mhz), n_max,
                            j_max);
}

StateVector bare_ground(const FullSystem& sys) {
    Vector v = Vector::Zero(sys.dim());
    v(0) = 1.0;
    return StateVector(std::move(v), {sys.j_max, sys.n_max + 1}, Basis::BareLab);
}

// one-level "qubit" turns the full model into a driven damped cavity
FullSystem empty_qubit_system(double eps_mhz, Index n_max) {
    Eigen::VectorXd omega(1);
    omega << 0.0;
    const QubitSpectrum trivial = make_synthetic_spectrum(omega, Matrix::Zero(1, 1));
    return make_full_system(trivial, omega_r, omega_r, 0.0, kappa, mhz_to_rad(eps_mhz),
                            n_max, 1);
}

} // namespace

TEST_CASE("hamiltonian_at: trivial structure") {
    const FullSystem sys = small_system(g_coupling, 0.0, 8, 4);
    const Matrix h1 = hamiltonian_at(sys, 1.0).matrix;
    const Matrix h2 = hamiltonian_at(sys, 2.34).matrix;
    CHECK(max_abs(Matrix(h1 - h2)) == 0.0);  // eps_d = 0: time independent

    const FullSystem driven = small_system(g_coupling, 10.0, 8, 4);
    const Matrix at0 = hamiltonian_at(driven, 0.0).matrix;
    CHECK(max_abs(Matrix(at0 - h1)) == 0.0);  // sin(0) = 0 kills the drive
}

TEST_CASE("hamiltonian_at: uncoupled limit has exact product eigenvalues") {
    const FullSystem sys = small_system(0.0, 0.0, 6, 3);
    Eigen::SelfAdjointEigenSolver<Matrix> es(hamiltonian_at(sys, 0.0).matrix,
                                             Eigen::EigenvaluesOnly);
    std::vector<double> expect;
    for (Index j = 0; j < 3; ++j)
        for (Index n = 0; n < 7; ++n)
            expect.push_back(sys.spectrum.omega(j) + n * omega_r);
    std::sort(expect.begin(), expect.end());
    for (Index k = 0; k < es.eigenvalues().size(); ++k)
        CHECK(es.eigenvalues()(k) == doctest::Approx(expect[k]).epsilon(1e-12));
}

TEST_CASE("hamiltonian_at: Hermitian at random times") {
    const FullSystem sys = small_system(g_coupling, 12.0, 10, 4);
    RngStream rng(99, 0);
    for (int k = 0; k < 100; ++k) {
        const double t = 500.0 * rng.next_double();
        CHECK(hermiticity_defect(hamiltonian_at(sys, t).matrix) < 1e-10);
    }
}

TEST_CASE("monte carlo: seed determinism is bit exact") {
    const FullSystem sys = small_system(g_coupling, 12.0, 12, 3);
    const auto grid = uniform_grid(50.0, 2.5);
    const TrajectoryEnsemble a = monte_carlo_evolve(sys, bare_ground(sys), grid, 6, 777);
    const TrajectoryEnsemble b = monte_carlo_evolve(sys, bare_ground(sys), grid, 6, 777);
    REQUIRE(a.averages.rows.size() == b.averages.rows.size());
    for (std::size_t i = 0; i < a.averages.rows.size(); ++i)
        for (std::size_t c = 0; c < a.averages.rows[i].size(); ++c)
            CHECK(a.averages.rows[i][c] == b.averages.rows[i][c]);
    const TrajectoryEnsemble other = monte_carlo_evolve(sys, bare_ground(sys), grid, 6, 778);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.averages.rows.size() && !any_diff; ++i)
        any_diff = a.averages.rows[i] != other.averages.rows[i];
    CHECK(any_diff);
}

TEST_CASE("monte carlo: kappa = 0 gives zero ensemble variance and no jumps") {
    FullSystem sys = small_system(g_coupling, 8.0, 10, 3);
    sys.kappa = 0.0;
    const auto grid = uniform_grid(25.0, 2.5);
    const TrajectoryEnsemble ens = monte_carlo_evolve(sys, bare_ground(sys), grid, 5, 31);
    for (const auto& traj : ens.jumps) CHECK(traj.empty());
    for (const auto& row : ens.averages.rows)
        CHECK(row.back() < 1e-15);  // stderr of identical trajectories (mean roundoff)
}

TEST_CASE("monte carlo vs master equation: empty-qubit driven cavity") {
    const Index n_max = 12;
    const FullSystem sys = empty_qubit_system(10.0, n_max);
    const auto grid = uniform_grid(250.0, 2.5);
    const TrajectoryEnsemble ens =
        monte_carlo_evolve(sys, bare_ground(sys), grid, 400, 2026);

    // lab-frame master equation oracle: H = wr n + sin(wd t) W
    const Index np = n_max + 1;
    const Matrix a = destroy(np);
    LindbladSystem ls;
    ls.H = to_sparse(Matrix(omega_r * number_op(np)));
    ls.W = to_sparse(Matrix(-2.0 * sys.epsilon_d * im_unit * (a.adjoint() - a)));
    ls.omega_drive = sys.omega_d;
    ls.has_drive = true;
    ls.collapse.push_back({kappa, a});
    Vector vac = Vector::Zero(np);
    vac(0) = 1.0;
    const auto me = evolve_density_matrix(DensityMatrix(vac * vac.adjoint(), {np}, {}), ls,
                                          grid, {}, {{"n", number_op(np)}});

    // photon-number agreement within 3 standard errors of the n_avg estimator
    for (std::size_t i = 10; i < grid.size(); i += 20) {
        const double mc = ens.averages.rows[i][2];   // t, P0, n_avg, stderr
        const double ref = me.series.rows[i][1];
        double var = 0.0;  // crude scale: Poissonian spread over trajectories
        var = std::max(1e-4, ref) / 400.0;
        CHECK(std::abs(mc - ref) < 3.0 * std::sqrt(var) + 0.02 * std::max(1.0, ref));
    }
}

TEST_CASE("monte carlo: trajectory norms renormalize to 1 after jumps") {
    const FullSystem sys = small_system(g_coupling, 12.0, 10, 3);
    // drive hard enough that jumps certainly occur within the window
    const auto grid = uniform_grid(400.0, 2.5);
    const TrajectoryEnsemble ens = monte_carlo_evolve(sys, bare_ground(sys), grid, 3, 5);
    std::size_t total_jumps = 0;
    for (const auto& traj : ens.jumps) total_jumps += traj.size();
    CHECK(total_jumps > 0);
    for (const auto& row : ens.averages.rows) {
        double psum = 0.0;
        for (Index j = 0; j < 3; ++j) psum += row[1 + j];
        CHECK(psum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("bare observables: products and coherent states") {
    const Index jm = 4, np = 20;
    Vector v = Vector::Zero(jm * np);
    v(0) = 1.0;
    const StateVector g0(v, {jm, np}, Basis::BareLab);
    const BareObservables o = bare_observables(g0);
    CHECK(o.populations(0) == doctest::Approx(1.0));
    CHECK(o.n_avg == doctest::Approx(0.0));

    const cd alpha(1.1, -0.5);
    Vector coh = Vector::Zero(jm * np);
    const Vector c = coherent_state(np, alpha);
    for (Index n = 0; n < np; ++n) coh(n) = c(n);
    const BareObservables oc = bare_observables(StateVector(coh, {jm, np}, Basis::BareLab));
    CHECK(oc.n_avg == doctest::Approx(std::norm(alpha)).epsilon(1e-8));

    const StateVector wrong(v, {jm, np}, Basis::DressedRotating);
    CHECK_THROWS_AS(bare_observables(wrong), std::invalid_argument);
}

TEST_CASE("initial dressed ground state: bare leakage bounded by the SW margins") {
    const QubitSpectrum sp = diagonalize(table1_spec(), 4);
    const Index np = 21;
    const SWExpansion sw = first_order_generator(sp, g_coupling, omega_r);
    Vector v = Vector::Zero(4 * np);
    v(0) = 1.0;
    const StateVector psi0 =
        lab_frame_state(sw, StateVector(v, {4, np}, Basis::DressedRotating));
    const BareObservables o = bare_observables(psi0);
    const Matrix S = assemble_joint_generator(sw, np);
    const double bound = (S * v).squaredNorm();
    CHECK(o.populations(0) >= 1.0 - 1.1 * bound);
    CHECK(o.populations(0) <= 1.0);
}

TEST_CASE("semiclassical: damped free cavity follows the closed form") {
    FullSystem sys = small_system(0.0, 0.0, 1, 4);
    Vector psi0 = Vector::Zero(4);
    psi0(0) = 1.0;
    const cd alpha0(0.8, -0.3);
    const auto grid = uniform_grid(50.0, 2.5);
    const SemiclassicalResult res = evolve_semiclassical(sys, psi0, alpha0, grid);
    for (std::size_t i = 0; i < grid.size(); i += 5) {
        const cd expect = alpha0 * std::exp((-im_unit * omega_r - 0.5 * kappa) * grid[i]);
        CHECK(res.series.rows[i][5] ==
              doctest::Approx(std::norm(expect)).epsilon(1e-6));
    }
}

TEST_CASE("semiclassical: everything stationary without drive from the ground state") {
    const FullSystem sys = small_system(g_coupling, 0.0, 1, 4);
    Vector psi0 = Vector::Zero(4);
    psi0(0) = 1.0;
    const SemiclassicalResult res =
        evolve_semiclassical(sys, psi0, cd(0.0, 0.0), uniform_grid(100.0, 2.5));
    for (const auto& row : res.series.rows) {
        CHECK(row[1] == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(row[5] < 1e-12);
    }
}

TEST_CASE("semiclassical: g = 0 keeps qubit populations frozen under drive") {
    const FullSystem sys = small_system(0.0, 10.0, 1, 4);
    Vector psi0(4);
    psi0 << std::sqrt(0.7), std::sqrt(0.3), 0.0, 0.0;
    const SemiclassicalResult res =
        evolve_semiclassical(sys, psi0, cd(0.0, 0.0), uniform_grid(120.0, 2.5));
    for (const auto& row : res.series.rows) {
        CHECK(row[1] == doctest::Approx(0.7).epsilon(1e-10));
        CHECK(row[2] == doctest::Approx(0.3).epsilon(1e-10));
    }
    // driven cavity orbit amplitude approaches |eps/(delta_a - i kappa/2)| = 2 eps/kappa
    const SemiclassicalResult ring =
        evolve_semiclassical(sys, psi0, cd(0.0, 0.0), uniform_grid(2000.0, 2.5));
    const double target = std::norm(2.0 * sys.epsilon_d / sys.kappa);
    double peak = 0.0;
    for (std::size_t i = ring.series.rows.size() - 60; i < ring.series.rows.size(); ++i)
        peak = std::max(peak, ring.series.rows[i][5]);
    CHECK(peak == doctest::Approx(target).epsilon(0.03));
}

TEST_CASE("semiclassical: alpha equation is Ehrenfest-consistent with the full model") {
    const double g = ghz_to_rad(0.002);  // tiny coupling
    const FullSystem sys = small_system(g, 7.0, 14, 2);
    // product state: qubit superposition x coherent field
    Vector psi_q(2);
    psi_q << std::sqrt(0.6), cd(0.5, std::sqrt(0.15));
    psi_q /= psi_q.norm();
    const cd alpha(0.9, 0.4);
    const Index np = sys.n_max + 1;
    Vector joint = Vector::Zero(sys.dim());
    const Vector coh = coherent_state(np, alpha);
    for (Index j = 0; j < 2; ++j)
        for (Index n = 0; n < np; ++n) joint(j * np + n) = psi_q(j) * coh(n);

    const double t = 3.7;
    SemiclassicalState st;
    st.alpha = alpha;
    st.psi = psi_q;
    st.t = t;
    const SemiclassicalDeriv d = semiclassical_rhs(st, sys);

    // d<a>/dt from the full master equation: Tr(a L(rho))
    const Matrix H = hamiltonian_at(sys, t).matrix;
    const Matrix rho = joint * joint.adjoint();
    const Matrix aop = kron(identity(2), destroy(np));
    const Matrix drho = lindblad_rhs(H, {{sys.kappa, aop}}, rho);
    const cd dadt = (aop * drho).trace();
    CHECK(std::abs(d.dalpha - dadt) < 1e-6 * std::max(1.0, std::abs(dadt)));
}
