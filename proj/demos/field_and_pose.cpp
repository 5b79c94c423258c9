// Places the default EPM to produce a requested field at the catheter, checks
// the placement by evaluating the dipole field there, and prints how much the
// catheter tip bends across the usable field band.

#include <mscr/magnetics.hpp>

#include <cstdio>

int main() {
  using namespace mscr;
  using namespace mscr::magnetics;

  const double moment = default_epm_moment();
  std::printf("EPM moment %.1f A m^2\n\n", moment);

  std::printf("%10s %10s %12s %14s\n", "B_req mT", "heading", "standoff mm", "B_check mT");
  for (double b_mT : {16.0, 20.0, 25.0}) {
    for (const Vec3& heading : {Vec3(Vec3::UnitZ()), Vec3(1.0, 0.0, 1.0)}) {
      InversePoseOptions opts;
      opts.heading = heading;
      const Vec3 b_req(b_mT * 1e-3, 0.0, 0.0);
      const DipoleSource src = inverse_pose(b_req, moment, opts);
      const Vec3 b = dipole_field(src, opts.target);
      std::printf("%10.1f %10s %12.1f %14.4f\n", b_mT, heading.x() == 0.0 ? "overhead" : "oblique",
                  src.position.norm() * 1e3, b.norm() * 1e3);
    }
  }

  const CatheterParams cat;
  std::printf("\n%10s %16s\n", "B mT", "tip deflection mm");
  for (double b_mT = 0.0; b_mT <= 25.0; b_mT += 5.0)
    std::printf("%10.1f %16.2f\n", b_mT, max_deflection(cat, b_mT * 1e-3) * 1e3);
  return 0;
}
