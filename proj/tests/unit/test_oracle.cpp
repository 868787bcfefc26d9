#include <doctest.h>

#include <cmath>
#include <sstream>

#include <pmcf/errors.hpp>
#include <pmcf/oracle.hpp>

using namespace pmcf;

TEST_CASE("exact circle solution")
{
  CHECK(exact_circle_solution(1.0, 1.0, 0.0) == 0.5);
  CHECK(std::abs(exact_circle_solution(1.0, 2.0, 0.0) - 1.0 / 3.0) <= 1e-16);
  for (double k : {1.0, 1.5, 2.0, 3.0})
    CHECK(exact_circle_solution(1.7, k, 1.7) == 0.0);
  CHECK(exact_circle_solution(2.0, 1.0, 1.0) == doctest::Approx(1.5));
  CHECK(exact_circle_derivative(1.0, 2.0, 0.5) == doctest::Approx(-0.25));
  CHECK_THROWS_AS(exact_circle_solution(1.0, 1.0, 1.1), OutOfDomain);
  CHECK_THROWS_AS(exact_circle_solution(1.0, 1.0, -0.1), OutOfDomain);
  CHECK_THROWS_AS(exact_circle_solution(1.0, 0.0, 0.5), InvalidArgument);
}

TEST_CASE("exact solution is monotone in r and r0")
{
  for (double k : {1.0, 1.5, 2.0}) {
    for (int i = 1; i <= 100; ++i)
      CHECK(exact_circle_solution(1.0, k, i / 100.0) < exact_circle_solution(1.0, k, (i - 1) / 100.0));
    for (int i = 1; i <= 100; ++i) {
      const double r0 = 0.5 + i / 100.0;
      CHECK(exact_circle_solution(r0, k, 0.25) > exact_circle_solution(r0 - 0.01, k, 0.25));
    }
  }
}

TEST_CASE("radial profile basics")
{
  const RadialProfile p = radial_regularized_solve(1.0, 1.0, 0.1);
  CHECK(p.values.back() == 0.0);
  CHECK(p.r_nodes.front() == 0.0);
  CHECK(p.r_nodes.back() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.nonincreasing());
  CHECK(p.residual_inf <= 1e-12);
  CHECK(p(1.0) == 0.0);
  CHECK(p(5.0) == 0.0);
  CHECK(p(0.0) == p.values.front());
  CHECK(p(0.0) > 0.0);
  CHECK(p(0.0) < 0.5);

  CHECK_THROWS_AS(radial_regularized_solve(1.0, 1.0, 0.1, 999), InvalidArgument);
  CHECK_THROWS_AS(radial_regularized_solve(1.0, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("self-convergence of the radial scheme")
{
  for (double k : {1.0, 2.0}) {
    const double a = radial_regularized_solve(1.0, k, 0.1, 1000)(0.0);
    const double b = radial_regularized_solve(1.0, k, 0.1, 2000)(0.0);
    const double c = radial_regularized_solve(1.0, k, 0.1, 4000)(0.0);
    const double order = std::log2(std::abs(a - b) / std::abs(b - c));
    INFO("k=", k, " order=", order);
    CHECK(order >= 1.8);
  }
}

TEST_CASE("vanishing eps approaches the exact value monotonically")
{
  double previous = 0.0;
  for (double eps : {0.5, 0.25, 0.1, 0.05}) {
    const double center = radial_regularized_solve(1.0, 1.0, eps)(0.0);
    CHECK(center > previous);
    CHECK(center < exact_circle_solution(1.0, 1.0, 0.0));
    previous = center;
  }
  CHECK(std::abs(previous - 0.5) < 0.05);
}

TEST_CASE("large eps: source dominates weak diffusion")
{
  // for eps >> |u'| the equation is u'' + u'/r = -eps^{1-1/k}, so u(0) = eps^{1-1/k} r0^2 / 4
  const double eps = 50.0;
  for (double k : {1.0, 2.0}) {
    const double expected = std::pow(eps, 1.0 - 1.0 / k) / 4.0;
    CHECK(radial_regularized_solve(1.0, k, eps)(0.0) == doctest::Approx(expected).epsilon(1e-3));
  }
}

TEST_CASE("profile CSV")
{
  const RadialProfile p = radial_regularized_solve(1.0, 1.0, 0.5, 1000);
  std::ostringstream out;
  write_profile_csv(p, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "r,u");
  int rows = 0;
  while (std::getline(in, line))
    ++rows;
  CHECK(rows == static_cast<int>(p.r_nodes.size()));
}
