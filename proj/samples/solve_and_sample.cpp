// Solves the third-order equation at alpha = 0.7 by both routes, then checks
// the n = 2, alpha = 1/2 solution against Brownian motion at a reflecting
// Brownian time.
#include <cmath>
#include <cstdio>

#include <fracheat/montecarlo.hpp>
#include <fracheat/solver.hpp>

using namespace fracheat;

int main() {
    solver::SolutionRequest req;
    req.spec = kernel::make_equation_spec(3, +1);
    req.alpha = 0.7;
    req.t = 1.0;
    for (int i = 0; i <= 8; ++i) req.x_grid.push_back(-4.0 + i);

    req.route = solver::SolveRoute::subordination;
    const auto sub = solver::solve(req);
    req.route = solver::SolveRoute::fourier_ml;
    const auto four = solver::solve(req);

    std::printf("%6s %18s %18s\n", "x", "subordination", "fourier_ml");
    for (std::size_t i = 0; i < req.x_grid.size(); ++i)
        std::printf("%6.1f %18.12f %18.12f\n", req.x_grid[i], sub.values[i].value, four.values[i].value);

    const auto batch = montecarlo::sample_composed_bm(0.5, 1.0, {42, 0}, 200000);
    const auto m2 = montecarlo::empirical_moment(batch.values, 2.0);
    const double exact = solver::solution_moment(kernel::make_equation_spec(2), 0.5, 2, 1.0);
    std::printf("\nE X^2 of B(T_1/2(1)): %.5f +- %.5f (exact %.5f)\n", m2.mean, m2.standard_error, exact);
    std::printf("u(0,1) for n = 2, alpha = 1/2: %.12f, 1/(2 Gamma(3/4)) = %.12f\n",
                solver::wright_closed_form_n2(0.5, 0.0, 1.0), 1.0 / (2.0 * std::tgamma(0.75)));
}
