#include <safetrack/dynamics.hpp>

#include <safetrack/rng.hpp>

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

namespace safetrack {

Vector LagrangianPlant::acceleration(const Vector& p, const Vector& v,
                                     const Vector& u) const {
  const Vector rhs = u - coriolis(p, v) * v - gravity(p) - damping(p, v);
  return mass(p).llt().solve(rhs);
}

Vector AffinePlant::acceleration(const Vector& p, const Vector& v, const Vector& u,
                                 Scalar t) const {
  return drift(p, v, t) + actuation(p, v, t) * u;
}

AffinePlant to_affine(const LagrangianPlant& plant) {
  AffinePlant affine;
  affine.dim_state = plant.dim;
  affine.dim_input = plant.dim;
  affine.drift = [plant](const Vector& p, const Vector& v, Scalar) -> Vector {
    const Vector rhs = -(plant.coriolis(p, v) * v + plant.gravity(p) + plant.damping(p, v));
    return plant.mass(p).llt().solve(rhs);
  };
  affine.actuation = [plant](const Vector& p, const Vector&, Scalar) -> Matrix {
    return plant.mass(p).llt().solve(Matrix::Identity(plant.dim, plant.dim));
  };
  const auto drift = affine.drift;
  affine.drift_jacobian_v = [drift](const Vector& p, const Vector& v,
                                    Scalar t) -> Matrix {
    const Index n = v.size();
    Matrix jac(n, n);
    for (Index k = 0; k < n; ++k) {
      const Scalar h = 1e-5 * std::max<Scalar>(1.0, std::abs(v[k]));
      Vector vp = v, vm = v;
      vp[k] += h;
      vm[k] -= h;
      jac.col(k) = (drift(p, vp, t) - drift(p, vm, t)) / (2.0 * h);
    }
    return jac;
  };
  return affine;
}

AffinePlant make_nonlinear_example_plant(bool underactuated) {
  AffinePlant plant;
  plant.dim_state = 2;
  plant.dim_input = underactuated ? 1 : 2;
  plant.drift = [](const Vector& p, const Vector& v, Scalar) -> Vector {
    Vector f(2);
    f[0] = std::cos(p[0]) * p[1] - v[0] + v[1];
    f[1] = -std::sin(p[1]) * p[0] * v[1] + v[0] * v[0] - v[1] - 2.0 * v[0] * v[1];
    return f;
  };
  plant.drift_jacobian_v = [](const Vector& p, const Vector& v, Scalar) -> Matrix {
    Matrix jac(2, 2);
    jac(0, 0) = -1.0;
    jac(0, 1) = 1.0;
    jac(1, 0) = 2.0 * v[0] - 2.0 * v[1];
    jac(1, 1) = -std::sin(p[1]) * p[0] - 1.0 - 2.0 * v[0];
    return jac;
  };
  if (underactuated) {
    plant.actuation = [](const Vector&, const Vector&, Scalar) -> Matrix {
      Matrix b(2, 1);
      b << 1.0, 0.0;
      return b;
    };
  } else {
    plant.actuation = [](const Vector&, const Vector&, Scalar) -> Matrix {
      return Matrix::Identity(2, 2);
    };
  }
  return plant;
}

AffinePlant make_spacecraft_planar_plant() {
  AffinePlant plant;
  plant.dim_state = 3;
  plant.dim_input = 3;
  plant.drift = [](const Vector&, const Vector&, Scalar) -> Vector {
    return Vector::Zero(3);
  };
  plant.actuation = [](const Vector&, const Vector&, Scalar) -> Matrix {
    return Matrix::Identity(3, 3);
  };
  plant.drift_jacobian_v = [](const Vector&, const Vector&, Scalar) -> Matrix {
    return Matrix::Zero(3, 3);
  };
  return plant;
}

LagrangianPlant make_leo_hcw_plant(Scalar mean_motion) {
  if (!(mean_motion > 0))
    throw ValidationError("leo_hcw: mean_motion must be > 0");
  LagrangianPlant plant;
  plant.dim = 3;
  plant.mass = [](const Vector&) -> Matrix { return Matrix::Identity(3, 3); };
  // xdd - 2 n ydot - 3 n^2 x = ux, ydd + 2 n xdot = uy, zdd + n^2 z = uz.
  plant.coriolis = [mean_motion](const Vector&, const Vector&) -> Matrix {
    Matrix c = Matrix::Zero(3, 3);
    c(0, 1) = -2.0 * mean_motion;
    c(1, 0) = 2.0 * mean_motion;
    return c;
  };
  plant.gravity = [mean_motion](const Vector& p) -> Vector {
    Vector g(3);
    g[0] = -3.0 * mean_motion * mean_motion * p[0];
    g[1] = 0.0;
    g[2] = mean_motion * mean_motion * p[2];
    return g;
  };
  plant.damping = [](const Vector&, const Vector&) -> Vector {
    return Vector::Zero(3);
  };
  return plant;
}

LagrangianPlant make_unit_mass_plant(Index n) {
  LagrangianPlant plant;
  plant.dim = n;
  plant.mass = [n](const Vector&) -> Matrix { return Matrix::Identity(n, n); };
  plant.coriolis = [n](const Vector&, const Vector&) -> Matrix {
    return Matrix::Zero(n, n);
  };
  plant.gravity = [n](const Vector&) -> Vector { return Vector::Zero(n); };
  plant.damping = [n](const Vector&, const Vector&) -> Vector {
    return Vector::Zero(n);
  };
  return plant;
}

Plant make_plant(const std::string& key, const PlantParams& params) {
  Plant plant;
  plant.key = key;
  if (key == "nonlinear_example") {
    plant.affine = make_nonlinear_example_plant(params.underactuated);
  } else if (key == "spacecraft_planar") {
    plant.affine = make_spacecraft_planar_plant();
  } else if (key == "leo_hcw") {
    plant.lagrangian = make_leo_hcw_plant(params.mean_motion);
    plant.affine = to_affine(*plant.lagrangian);
    // HCW drift is linear in v with constant coefficient -C.
    const Scalar n_bar = params.mean_motion;
    plant.affine.drift_jacobian_v = [n_bar](const Vector&, const Vector&,
                                            Scalar) -> Matrix {
      Matrix jac = Matrix::Zero(3, 3);
      jac(0, 1) = 2.0 * n_bar;
      jac(1, 0) = -2.0 * n_bar;
      return jac;
    };
  } else if (key == "unit_mass") {
    plant.lagrangian = make_unit_mass_plant(params.dim);
    plant.affine = to_affine(*plant.lagrangian);
    const Index n = params.dim;
    plant.affine.drift_jacobian_v = [n](const Vector&, const Vector&, Scalar) -> Matrix {
      return Matrix::Zero(n, n);
    };
  } else {
    throw ValidationError("plant: unknown key '" + key + "'");
  }
  return plant;
}

namespace {

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr int kQuadOrder = 8;
constexpr double kQuadNode[kQuadOrder] = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
constexpr double kQuadWeight[kQuadOrder] = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

}  // namespace

Matrix sdc_factorize(const AffinePlant& plant, const Vector& p, const Vector& v,
                     const Vector& v_ref, Scalar t) {
  if (!plant.drift_jacobian_v)
    throw ValidationError("sdc_factorize: plant has no velocity Jacobian");
  const Index n = plant.dim_state;
  Matrix a = Matrix::Zero(n, n);
  const Vector dv = v - v_ref;
  for (int q = 0; q < kQuadOrder; ++q) {
    const Scalar s = 0.5 * (kQuadNode[q] + 1.0);
    a += (0.5 * kQuadWeight[q]) * plant.drift_jacobian_v(p, v_ref + s * dv, t);
  }
  return a;
}

void DisturbanceSpec::validate() const {
  if (d_bar < 0) throw ValidationError("DisturbanceSpec.d_bar: must be >= 0");
  if (gamma_bar < 0) throw ValidationError("DisturbanceSpec.gamma_bar: must be >= 0");
}

namespace {

Vector seeded_direction(const DisturbanceSpec& spec, int agent, Index n) {
  return rng::unit_vector(rng::key(spec.seed, 0x6469ULL, agent), n);
}

}  // namespace

Vector disturbance_value(const DisturbanceSpec& spec, const World& world, int agent,
                         Scalar t) {
  const Index n = world.dim();
  if (spec.d_bar == 0.0) return Vector::Zero(n);
  switch (spec.profile) {
    case DisturbanceSpec::Profile::kConstantDirection:
      return spec.d_bar * seeded_direction(spec, agent, n);
    case DisturbanceSpec::Profile::kSinusoidal: {
      const std::uint64_t k = rng::key(spec.seed, 0x73696eULL, agent);
      const Scalar omega = rng::uniform(rng::mix(k, 1), 0.2, 1.5);
      const Scalar phase = rng::uniform(rng::mix(k, 2), 0.0, 2.0 * M_PI);
      return spec.d_bar * std::sin(omega * t + phase) * seeded_direction(spec, agent, n);
    }
    case DisturbanceSpec::Profile::kWorstCaseRadial: {
      // Push toward the nearest object; falls back to a fixed direction
      // when the agent has nothing around it.
      const Vector& p_i = world.agents[agent].p;
      Scalar best = std::numeric_limits<Scalar>::infinity();
      Vector dir = seeded_direction(spec, agent, n);
      auto consider = [&](const Vector& p_other) {
        const Vector delta = p_other - p_i;
        const Scalar dist = delta.norm();
        if (dist > 1e-9 && dist < best) {
          best = dist;
          dir = delta / dist;
        }
      };
      for (int j = 0; j < static_cast<int>(world.agents.size()); ++j)
        if (j != agent) consider(world.agents[j].p);
      for (const Vector& o : world.obstacles) consider(o);
      return spec.d_bar * dir;
    }
  }
  return Vector::Zero(n);
}

Matrix diffusion_matrix(const DisturbanceSpec& spec, Index n) {
  return (spec.gamma_bar / std::sqrt(static_cast<Scalar>(n))) * Matrix::Identity(n, n);
}

}  // namespace safetrack
