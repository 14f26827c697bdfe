#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "qmp/harness.hpp"
#include "qmp/random.hpp"

namespace qmp {

namespace {

void add_check(std::vector<CheckResult> &out, const std::string &name, double value,
               double threshold, bool lower_bound = false) {
    CheckResult r;
    r.name = name;
    r.value = value;
    r.threshold = threshold;
    r.lower_bound = lower_bound;
    r.pass = lower_bound ? value > threshold : value <= threshold;
    out.push_back(r);
}

Matrix polynomial_of(const HermitianObservable &x, const RealVector &coeffs) {
    return x.apply([&](double v) {
        double acc = 0.0, pow = 1.0;
        for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
            acc += coeffs(k) * pow;
            pow *= v;
        }
        return Complex(acc, 0.0);
    });
}

// Channel-structure suite over seeded random instances: unitality, bimodule
// property, PSD preservation (CP kernel families), trace duality, and
// pinching idempotence.
void kernel_suite(std::vector<CheckResult> &out, std::uint64_t seed, int instances) {
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    double unital = 0.0, bimodule = 0.0, positivity = 0.0, duality = 0.0, idem = 0.0;
    for (int inst = 0; inst < instances; ++inst) {
        const int d = 2 + inst % 7;
        const HermitianObservable x = HermitianObservable::decompose(random_hermitian(rng, d));

        MeanKernel kernel = MeanKernel::pinching();
        bool cp_family = true;
        switch (inst % 4) {
            case 0: break;
            case 1: kernel = MeanKernel::cesaro(1.0 + 19.0 * uniform_double(rng)); break;
            case 2: kernel = MeanKernel::gaussian(0.5 + 4.5 * uniform_double(rng)); break;
            case 3:
                kernel = MeanKernel::lattice_uniform(64, 16.0);
                cp_family = false;  // not a characteristic-function kernel
                break;
        }

        const Matrix a = random_matrix(rng, d);
        const Matrix ea = conditional_expectation(x, a, kernel);
        const int dd = d;

        unital = std::max(unital, max_abs(conditional_expectation(
                                      x, Matrix::Identity(dd, dd), kernel) -
                                  Matrix::Identity(dd, dd)));

        RealVector fc(4), gc(4);
        for (int k = 0; k < 4; ++k) {
            fc(k) = 2.0 * uniform_double(rng) - 1.0;
            gc(k) = 2.0 * uniform_double(rng) - 1.0;
        }
        const Matrix fx = polynomial_of(x, fc);
        const Matrix gx = polynomial_of(x, gc);
        bimodule = std::max(bimodule,
                            max_abs(conditional_expectation(x, Matrix(fx * a * gx), kernel) -
                                    fx * ea * gx));

        if (cp_family) {
            const Matrix psd = random_density(rng, d).matrix();
            const Matrix epsd = conditional_expectation(x, psd, kernel);
            Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (epsd + epsd.adjoint())),
                                                     Eigen::EigenvaluesOnly);
            positivity = std::max(positivity, std::max(0.0, -es.eigenvalues().minCoeff()));
        }

        const DensityState rho = random_density(rng, d);
        const Matrix erho = conditional_expectation(x, rho.matrix(), kernel);
        const Complex lhs = (ea * rho.matrix()).trace();
        const Complex rhs = (a * erho).trace();
        duality = std::max(duality, std::abs(lhs - rhs));

        const Matrix pinched = pinch(x, a);
        idem = std::max(idem, max_abs(pinch(x, pinched) - pinched));
    }
    add_check(out, "kernel.unitality", unital, 1e-12);
    add_check(out, "kernel.bimodule", bimodule, 1e-11);
    add_check(out, "kernel.positivity", positivity, 1e-10);
    add_check(out, "kernel.trace_duality", duality, 1e-11);
    add_check(out, "kernel.idempotence_pinching", idem, 1e-12);

    // E o E = E must fail visibly for a kernel that is not {0,1}-valued.
    Matrix x01 = Matrix::Zero(2, 2);
    x01(1, 1) = 1.0;
    const HermitianObservable x2 = HermitianObservable::decompose(x01);
    Matrix sx(2, 2);
    sx << 0, 1, 1, 0;
    const MeanKernel cesaro10 = MeanKernel::cesaro(10.0);
    const Matrix once = conditional_expectation(x2, sx, cesaro10);
    const Matrix twice = conditional_expectation(x2, once, cesaro10);
    add_check(out, "kernel.idempotence_defect_cesaro", operator_norm(twice - once), 0.01, true);
}

void lattice_suite(std::vector<CheckResult> &out, const Experiment &exp, std::uint64_t seed) {
    const Lattice &lat = exp.lattice;
    Rng rng(seed ^ 0xa5a5a5a5deadbeefULL);

    double parseval = 0.0;
    for (int inst = 0; inst < 10; ++inst) {
        Vector amp(lat.n());
        for (int j = 0; j < lat.n(); ++j) {
            amp(j) = Complex(normal_double(rng), normal_double(rng));
        }
        amp /= std::sqrt(amp.squaredNorm() * lat.dq());
        const WaveFunction wf{lat, amp};
        const double pos = wf.norm_squared();
        const double mom = wf.momentum_density().sum() * lat.dp();
        parseval = std::max(parseval, std::abs(pos - mom));
    }
    add_check(out, "lattice.parseval", parseval, 1e-12);

    const HermitianObservable p_obs = momentum_observable(lat);
    const Matrix f_p = p_obs.apply([](double p) { return Complex(std::cos(p), 0.0); });

    double d2 = 0.0;
    for (const auto &prep : exp.preparations) {
        Vector c = prep.wavefunction.coords();
        c /= c.norm();
        const Complex op_route = c.dot(f_p * c);
        double weighted = 0.0;
        for (int k = 0; k < lat.n(); ++k) {
            weighted += std::cos(lat.momentum(k)) * prep.momentum_density(k) * lat.dp();
        }
        d2 = std::max(d2, std::abs(op_route - Complex(weighted, 0.0)));
    }
    add_check(out, "lattice.d2_momentum_functional", d2, 1e-12);

    // Pinching with respect to Q of any f(P) is a multiple of the identity on
    // the cyclic lattice.
    const HermitianObservable q_obs = position_observable(lat);
    const Matrix pinched = pinch(q_obs, f_p);
    double avg = 0.0;
    for (int k = 0; k < lat.n(); ++k) avg += std::cos(lat.momentum(k));
    avg /= lat.n();
    add_check(out, "lattice.lemma31_constant_diagonal",
              max_abs(pinched - avg * Matrix::Identity(lat.n(), lat.n())), 1e-10);
}

Matrix momentum_twirl(const Experiment &exp, const ApparatusPreparation &prep) {
    const Lattice &lat = exp.lattice;
    Matrix acc = Matrix::Zero(exp.x.dim(), exp.x.dim());
    for (int k = 0; k < lat.n(); ++k) {
        const double w = prep.momentum_density(k) * lat.dp();
        if (w == 0.0) continue;
        const double p = lat.momentum(k);
        const Matrix e_plus = exp.x.apply([p](double v) {
            return Complex(std::cos(p * v), std::sin(p * v));
        });
        acc += w * (e_plus * exp.y_matrix * e_plus.adjoint());
    }
    return acc;
}

void process_suite(std::vector<CheckResult> &out, const Experiment &exp, std::uint64_t seed) {
    const Lattice &lat = exp.lattice;
    const int d = exp.x.dim();
    const Eigen::Index dn = static_cast<Eigen::Index>(d) * lat.n();
    Rng rng(seed ^ 0x0123456789abcdefULL);

    double unitary = 0.0, matches = 0.0, pointer_id = 0.0, twirl_err = 0.0;
    double joint_mass = 0.0, identity_y = 0.0, born_commuting = 0.0, posterior = 0.0;

    for (const auto &prep : exp.preparations) {
        const auto proc = MeasurementProcess::make(exp.x, lat, prep);

        const Vector psi = random_state_vector(rng, d);
        const Vector evolved = evolve_pure(proc, psi);
        unitary = std::max(unitary, std::abs(evolved.norm() - 1.0));

        const Matrix u = coupling_unitary(proc);
        if (dn <= 512) {
            Vector c = prep.wavefunction.coords();
            c /= c.norm();
            Vector composite(dn);
            for (int a = 0; a < d; ++a) {
                composite.segment(static_cast<Eigen::Index>(a) * lat.n(), lat.n()) = psi(a) * c;
            }
            matches = std::max(matches, (evolved - u * composite).cwiseAbs().maxCoeff());
        }

        const double length = lat.length();
        pointer_id = std::max(pointer_id, heisenberg_pointer_check(proc, [length](double q) {
                             return std::cos(2.0 * std::numbers::pi * q / length);
                         }));

        const Matrix contracted = apparatus_contraction(
            proc, Matrix(u.adjoint() *
                         tensor_product(exp.y_matrix, Matrix::Identity(lat.n(), lat.n())) * u));
        twirl_err = std::max(twirl_err, max_abs(contracted - momentum_twirl(exp, prep)));

        const auto joint = successive_joint(proc, exp.rho, exp.y, exp.bins);
        joint_mass = std::max(joint_mass,
                              std::max(std::abs(joint.table.sum() - 1.0),
                                       std::max(0.0, -joint.table.minCoeff())));

        const HermitianObservable identity_obs = HermitianObservable::from_eigensystem(
            Matrix::Identity(d, d), RealVector::Ones(d));
        const auto joint_id = successive_joint(proc, exp.rho, identity_obs, exp.bins);
        const RealVector pointer = pointer_distribution(proc, exp.rho, exp.bins);
        identity_y = std::max(identity_y,
                              (joint_id.pointer_marginal() - pointer).cwiseAbs().maxCoeff());

        // Commuting second observable: the y-marginal of the successive joint
        // equals the Born distribution of X exactly at every finite s.
        const auto joint_x = successive_joint(proc, exp.rho, exp.x, exp.bins);
        const RealVector y_marginal = joint_x.y_marginal();
        for (int g = 0; g < exp.x.groups(); ++g) {
            const double born = expectation(exp.x.projector(g), exp.rho).real();
            born_commuting = std::max(born_commuting, std::abs(y_marginal(g) - born));
        }

        try {
            const DensityState post = posterior_state(proc, exp.rho, exp.bins, exp.target_bins[0]);
            posterior = std::max(posterior, std::abs(post.matrix().trace().real() - 1.0));
        } catch (const Error &) {
            posterior = 1.0;
        }
    }

    add_check(out, "process.evolve_unitary", unitary, 1e-12);
    if (dn <= 512) add_check(out, "process.evolve_matches_unitary", matches, 1e-11);
    add_check(out, "process.pointer_identity_cyclic", pointer_id, 1e-10);
    add_check(out, "process.momentum_twirl_contraction", twirl_err, 1e-10);
    add_check(out, "process.joint_normalized", joint_mass, 1e-10);
    add_check(out, "process.joint_identity_y_marginal", identity_y, 1e-12);
    add_check(out, "process.born_commuting_marginal", born_commuting, 1e-10);
    add_check(out, "process.posterior_valid", posterior, 1e-10);
}

void sweep_suite(std::vector<CheckResult> &out, const Experiment &exp,
                 const std::vector<SweepRow> &rows) {
    double mean_err = 0.0, var_err = 0.0;
    for (const auto &row : rows) {
        mean_err = std::max(mean_err, row.pointer_mean_err);
        var_err = std::max(var_err, row.pointer_var_err);
    }
    add_check(out, "pointer.first_moment", mean_err, 1e-10);
    add_check(out, "pointer.second_moment", var_err, 1e-8);

    if (rows.size() >= 2) {
        double min_gap_decrease = std::numeric_limits<double>::infinity();
        double thm52_increase = 0.0, thm54_increase = 0.0;
        for (size_t k = 0; k + 1 < rows.size(); ++k) {
            min_gap_decrease =
                std::min(min_gap_decrease, rows[k].srinivas_gap - rows[k + 1].srinivas_gap);
            thm52_increase = std::max(thm52_increase,
                                      rows[k + 1].thm52_residual - rows[k].thm52_residual);
            thm54_increase = std::max(thm54_increase,
                                      rows[k + 1].thm54_residual - rows[k].thm54_residual);
        }
        add_check(out, "srinivas.monotone_decrease", min_gap_decrease, 0.0, true);
        add_check(out, "thm52.residual_monotone", thm52_increase, 1e-15);
        add_check(out, "thm54.residual_monotone", thm54_increase, 1e-15);
    }
    if (!rows.empty()) {
        add_check(out, "thm54.final_residual", rows.back().thm54_residual,
                  0.05 * operator_norm(exp.y_matrix));
        // No-go: with a nonzero pinching-complement the gap is strictly
        // positive at every finite s.
        if (max_abs(exp.y_matrix - pinch(exp.x, exp.y_matrix)) > 1e-12) {
            double min_gap = std::numeric_limits<double>::infinity();
            for (const auto &row : rows) min_gap = std::min(min_gap, row.srinivas_gap);
            add_check(out, "nogo.positive_gap", min_gap, 0.0, true);
        }
    }
}

}  // namespace

std::vector<CheckResult> run_invariant_suite(const Experiment &exp,
                                             const std::vector<SweepRow> &rows,
                                             std::uint64_t seed, bool full) {
    std::vector<CheckResult> out;
    if (full) {
        kernel_suite(out, seed, 50);
        if (exp.lattice_based) {
            lattice_suite(out, exp, seed);
            process_suite(out, exp, seed);
        }
    }
    if (exp.lattice_based) sweep_suite(out, exp, rows);
    return out;
}

}  // namespace qmp
