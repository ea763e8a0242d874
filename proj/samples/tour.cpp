// A short walk through the library: brackets, a star product, the sphere
// representation and one polarized function.
#include "mm3/polarization.hpp"
#include "mm3/repn.hpp"

#include <iostream>

using namespace mm3;

int main() {
  std::cout << "[X1, E2] = " << lie::bracket(lie::basis(1), lie::basis(5)).str() << "\n";

  Rational lambda = 2;
  auto cfg = moyal::make_config(orbit::kirillov_matrix(lambda).form);
  auto u = expr::NormalForm::from_expr(orbit::energy(lie::basis(5), lambda));
  auto f = expr::NormalForm::from_expr(expr::parse("s1^2 + t1*s2"));
  std::cout << "energy of E2 at lambda=2: " << expr::print(u.to_expr()) << "\n";
  std::cout << "E2~ * f = " << expr::print(moyal::star(u, f, cfg).value.to_expr()) << "\n";

  auto g = lie::from_factors({0.3, -0.2, 0.5}, 0.4, -0.3, 1.1);
  sphere::QuadratureGrid grid(12, 24);
  auto s = sphere::SphereFunction(sphere::sigma(1) * sphere::sigma(2));
  std::cout << "factored vs reference unitary: " << repn::reference_residual(g, 2.0, s, grid) << "\n";

  polarization::Character chi{Rational(1, 2), -1, lambda};
  auto fc = polarization::make_f_chi(chi, expr::parse("1 + t1"));
  auto pcfg = moyal::make_config(polarization::fit_polarization_bivector(lambda).real());
  for (int i = 1; i <= 3; ++i)
    std::cout << "eigen residual E~" << i << ": "
              << (polarization::eigen_check(fc.f, i, chi, pcfg).verdict.zero ? "zero" : "nonzero") << "\n";
}
