// tests/test_phased_array.cpp

// Copyright 2026 The BMX Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "bmx/phased_array.hpp"
#include "bmx/rng.hpp"

using bmx::ArrayGeometry;
using bmx::deg2rad;
using bmx::SteeringVector;

namespace {

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(
      std::distance(v.begin(), std::max_element(v.begin(), v.end())));
}

}  // namespace

TEST_CASE("steering_phases") {
  const ArrayGeometry geom = bmx::awr1843_geometry();

  SECTION("boresight needs no shifts") {
    const SteeringVector sv = bmx::steering_phases(geom, 0.0);
    for (double p : sv.phases_rad) CHECK(p == 0.0);
  }
  SECTION("+30 and -30 degrees reduce to identical vectors") {
    const SteeringVector pos = bmx::steering_phases(geom, deg2rad(30.0));
    const SteeringVector neg = bmx::steering_phases(geom, deg2rad(-30.0));
    auto mod_dist = [](double a, double b) {
      const double d = std::abs(a - b);
      return std::min(d, 2.0 * M_PI - d);
    };
    REQUIRE(pos.phases_rad.size() == 3);
    CHECK(pos.phases_rad[0] == 0.0);
    CHECK(mod_dist(pos.phases_rad[1], M_PI) <= 1e-9);
    CHECK(mod_dist(pos.phases_rad[2], 0.0) <= 1e-9);
    for (std::size_t n = 0; n < 3; ++n) {
      // identical after mod-2pi reduction (up to fp wrap at 0/2pi)
      const double diff = std::abs(pos.phases_rad[n] - neg.phases_rad[n]);
      CHECK(std::min(diff, 2.0 * M_PI - diff) <= 1e-9);
    }
  }
  SECTION("+15 degrees matches the closed form") {
    const SteeringVector sv = bmx::steering_phases(geom, deg2rad(15.0));
    CHECK(sv.phases_rad[1] == Catch::Approx(1.6262).margin(1e-4));
    CHECK(sv.phases_rad[2] == Catch::Approx(3.2524).margin(2e-4));
  }
  SECTION("phases live in [0, 2pi) with leading zero") {
    bmx::Rng rng(3);
    for (int i = 0; i < 200; ++i) {
      const double theta = rng.uniform(-89.0, 89.0);
      const SteeringVector sv = bmx::steering_phases(geom, deg2rad(theta));
      CHECK(sv.phases_rad[0] == 0.0);
      for (double p : sv.phases_rad) {
        CHECK(p >= 0.0);
        CHECK(p < 2.0 * M_PI);
      }
    }
  }
  SECTION("steering beyond +/-90 degrees is out of domain") {
    CHECK_THROWS_AS(bmx::steering_phases(geom, M_PI / 2.0), bmx::Error);
    CHECK_THROWS_AS(bmx::steering_phases(geom, -M_PI / 2.0), bmx::Error);
  }
}

TEST_CASE("quantize_phases maps to the 64-word register") {
  const ArrayGeometry geom = bmx::awr1843_geometry();

  SECTION("zero phase is word 0") {
    SteeringVector sv = bmx::quantize_phases(bmx::steering_phases(geom, 0.0));
    for (int w : sv.quantized_steps) CHECK(w == 0);
  }
  SECTION("180 degrees is word 32 exactly") {
    SteeringVector sv;
    sv.phases_rad = {0.0, M_PI};
    sv = bmx::quantize_phases(sv);
    CHECK(sv.quantized_steps[1] == 32);
  }
  SECTION("1.6262 rad quantizes to word 17") {
    SteeringVector sv;
    sv.phases_rad = {0.0, 1.6262};
    sv = bmx::quantize_phases(sv);
    CHECK(sv.quantized_steps[1] == 17);
    const double err =
        std::abs(bmx::rad2deg(sv.effective_phase(1) - sv.phases_rad[1]));
    CHECK(err == Catch::Approx(2.45).margin(0.01));
    CHECK(err <= 2.8125);
  }
  SECTION("quantization error is bounded by half a step") {
    bmx::Rng rng(11);
    for (int i = 0; i < 500; ++i) {
      const double theta = rng.uniform(-89.0, 89.0);
      SteeringVector sv =
          bmx::quantize_phases(bmx::steering_phases(geom, deg2rad(theta)));
      for (std::size_t n = 0; n < sv.phases_rad.size(); ++n) {
        double diff =
            std::abs(bmx::rad2deg(sv.effective_phase(n) - sv.phases_rad[n]));
        diff = std::min(diff, 360.0 - diff);  // register is modular
        CHECK(diff <= 2.8125 + 1e-9);
      }
      for (int w : sv.quantized_steps) {
        CHECK(w >= 0);
        CHECK(w <= 63);
      }
    }
  }
  SECTION("+30 and -30 quantize to the same words") {
    const auto pos =
        bmx::quantize_phases(bmx::steering_phases(geom, deg2rad(30.0)));
    const auto neg =
        bmx::quantize_phases(bmx::steering_phases(geom, deg2rad(-30.0)));
    CHECK(pos.quantized_steps == neg.quantized_steps);
  }
}

TEST_CASE("array_pattern") {
  const ArrayGeometry geom = bmx::awr1843_geometry();
  const auto grid = bmx::default_angle_grid();

  SECTION("boresight beam peaks at zero degrees") {
    const auto pattern =
        bmx::array_pattern(geom, bmx::steering_phases(geom, 0.0), grid);
    CHECK(std::abs(bmx::rad2deg(grid[argmax(pattern)])) <= 0.25);
  }
  SECTION("normalized gain lies in [0, 1] with peak 1") {
    bmx::Rng rng(5);
    for (int i = 0; i < 20; ++i) {
      const double theta = rng.uniform(-60.0, 60.0);
      const auto pattern = bmx::array_pattern(
          geom, bmx::steering_phases(geom, deg2rad(theta)), grid);
      double peak = 0.0;
      for (double g : pattern) {
        CHECK(g >= 0.0);
        CHECK(g <= 1.0 + 1e-12);
        peak = std::max(peak, g);
      }
      CHECK(peak == Catch::Approx(1.0));
    }
  }
  SECTION("boresight pattern is symmetric") {
    const auto sv = bmx::steering_phases(geom, 0.0);
    for (double deg = 0.0; deg <= 90.0; deg += 0.5) {
      const double gp = bmx::field_gain(geom, sv, deg2rad(deg));
      const double gm = bmx::field_gain(geom, sv, deg2rad(-deg));
      CHECK(std::abs(gp - gm) <= 1e-12);
    }
  }
  SECTION("15-degree beam keeps the main lobe on target") {
    const auto pattern = bmx::array_pattern(
        geom, bmx::steering_phases(geom, deg2rad(15.0)), grid);
    const double peak_deg = bmx::rad2deg(grid[argmax(pattern)]);
    CHECK(std::abs(peak_deg - 15.0) <= 1.0);
  }
  SECTION("45-degree beam is dominated by a side lobe") {
    const auto pattern = bmx::array_pattern(
        geom, bmx::steering_phases(geom, deg2rad(45.0)), grid);
    double at_45 = 0.0, away = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double deg = bmx::rad2deg(grid[i]);
      if (std::abs(deg - 45.0) <= 2.0) {
        at_45 = std::max(at_45, pattern[i]);
      } else if (std::abs(deg - 45.0) > 5.0) {
        away = std::max(away, pattern[i]);
      }
    }
    CHECK(away > at_45);
  }
}

TEST_CASE("usable_steering_range") {
  SECTION("wavelength-spaced preset is usable within 30 degrees only") {
    const auto usable = bmx::usable_steering_range(bmx::awr1843_geometry(), 5.0);
    auto contains = [&](double a) {
      return std::any_of(usable.begin(), usable.end(),
                         [&](double u) { return std::abs(u - a) < 1e-9; });
    };
    CHECK(contains(0.0));
    CHECK(contains(15.0));
    CHECK(contains(-15.0));
    CHECK(contains(30.0));
    CHECK(contains(-30.0));
    CHECK_FALSE(contains(45.0));
    CHECK_FALSE(contains(-45.0));
  }
  SECTION("a single isotropic element is usable everywhere") {
    ArrayGeometry geom;
    geom.element_offsets_m = {0.0};
    geom = geom.validated();
    const auto usable = bmx::usable_steering_range(geom, 5.0);
    CHECK(usable.size() == 35);  // every scanned angle in (-90, 90)
  }
  SECTION("half-wavelength spacing widens the usable range") {
    const ArrayGeometry full = bmx::awr1843_geometry();
    ArrayGeometry half = full;
    half.element_offsets_m = {0.0, full.wavelength_m / 2.0,
                              full.wavelength_m};
    half = half.validated();
    const auto usable_full = bmx::usable_steering_range(full, 5.0);
    const auto usable_half = bmx::usable_steering_range(half, 5.0);
    CHECK(usable_half.size() > usable_full.size());
    // and everything usable at lambda spacing stays usable at lambda/2
    for (double a : usable_full) {
      CHECK(std::any_of(usable_half.begin(), usable_half.end(),
                        [&](double u) { return std::abs(u - a) < 1e-9; }));
    }
  }
}
