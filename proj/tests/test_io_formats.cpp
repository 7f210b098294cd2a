// tests/test_io_formats.cpp

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

#include <filesystem>
#include <fstream>

#include "bmx/io/checkpoint.hpp"
#include "bmx/io/config_json.hpp"
#include "bmx/io/dataset_file.hpp"
#include "bmx/io/raw_file.hpp"
#include "bmx/rng.hpp"

namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "bmx_io_test";
  fs::create_directories(dir);
  return dir;
}

std::vector<char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bmx::Dataset small_dataset(std::size_t n, std::uint64_t seed) {
  bmx::Dataset ds;
  bmx::Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    bmx::RdmSequence s;
    s.tensor = bmx::Tensor4<double>(6, 4, 2, 3);
    s.axes.range_bin_m = 0.0414f;
    s.axes.doppler_bin_mps = 0.028f;
    s.axes.range_start_bin = 29;
    s.axes.doppler_center_bin = 2;
    s.beam_angles_deg = {0.0, 15.0};
    s.label = static_cast<int>(i % 6);
    // quantized values survive the f32 payload exactly
    for (auto& v : s.tensor.data()) {
      v = static_cast<double>(static_cast<float>(rng.uniform01()));
    }
    ds.push_original(std::move(s));
  }
  return ds;
}

}  // namespace

TEST_CASE("dataset file round trip") {
  const fs::path dir = temp_dir();
  const auto ds = small_dataset(7, 1);
  const fs::path a = dir / "a.bmxd";
  const fs::path b = dir / "b.bmxd";
  bmx::io::write_dataset(ds, a);

  SECTION("write -> read -> write is byte-identical") {
    const auto back = bmx::io::read_dataset(a);
    REQUIRE(back.size() == ds.size());
    bmx::io::write_dataset(back, b);
    CHECK(slurp(a) == slurp(b));
  }

  SECTION("contents survive the round trip") {
    const auto back = bmx::io::read_dataset(a);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      CHECK(back.samples[i].label == ds.samples[i].label);
      CHECK(back.samples[i].tensor.data() == ds.samples[i].tensor.data());
      CHECK(back.samples[i].beam_angles_deg == ds.samples[i].beam_angles_deg);
      CHECK(back.samples[i].axes.range_start_bin == 29);
    }
  }

  SECTION("magic bytes are BMXD") {
    const auto bytes = slurp(a);
    REQUIRE(bytes.size() > 4);
    CHECK(std::string(bytes.data(), 4) == "BMXD");
  }

  SECTION("a flipped payload byte fails the checksum") {
    auto bytes = slurp(a);
    bytes[bytes.size() / 2] = static_cast<char>(bytes[bytes.size() / 2] ^ 0x40);
    const fs::path corrupt = dir / "corrupt.bmxd";
    std::ofstream(corrupt, std::ios::binary)
        .write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    CHECK_THROWS_AS(bmx::io::read_dataset(corrupt), bmx::Error);
  }

  SECTION("an empty dataset writes a valid header") {
    bmx::Dataset empty;
    const fs::path e = dir / "empty.bmxd";
    bmx::io::write_dataset(empty, e);
    const auto back = bmx::io::read_dataset(e);
    CHECK(back.size() == 0);
  }
}

TEST_CASE("raw capture file round trip") {
  const fs::path dir = temp_dir();
  bmx::RawCapture cap;
  cap.chirp = bmx::ChirpConfig{}.validated();
  cap.chirp.adc_samples = 16;
  cap.chirp.slope_hz_per_s = 0.0;
  cap.chirp = cap.chirp.validated();
  cap.frame.beams_per_frame = 2;
  cap.frame.chirps_per_beam = 4;
  cap.frame.chirps_per_frame = 8;
  cap.frame.frame_rate_fps = 3.5;
  cap.beam_angles_deg = {0.0, 15.0};
  cap.label = 2;
  bmx::Rng rng(3);
  for (int t = 0; t < 3; ++t) {
    bmx::RawFrame fr(16, 4, 2);
    for (auto& v : fr.data) {
      v = {static_cast<double>(static_cast<float>(rng.normal())),
           static_cast<double>(static_cast<float>(rng.normal()))};
    }
    cap.frames.push_back(std::move(fr));
  }

  const fs::path p = dir / "cap.bmxf";
  bmx::io::write_raw_capture(cap, p);
  const auto back = bmx::io::read_raw_capture(p);
  CHECK(back.label == 2);
  CHECK(back.frames.size() == 3);
  CHECK(back.chirp.adc_samples == 16);
  CHECK(back.frame.chirps_per_beam == 4);
  CHECK(back.beam_angles_deg.size() == 2);
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(back.frames[t].data == cap.frames[t].data);
  }
  CHECK(back.chirp.slope_hz_per_s ==
        Catch::Approx(cap.chirp.slope_hz_per_s).epsilon(1e-15));
}

TEST_CASE("checkpoint round trip preserves every parameter bit") {
  const fs::path dir = temp_dir();
  bmx::neural::ModelConfig cfg;
  cfg.range_bins = 4;
  cfg.doppler_bins = 4;
  cfg.beams = 2;
  cfg.time_steps = 2;
  cfg.classes = 6;
  cfg.attention_layers = 1;
  cfg.heads = 4;
  cfg.conv_layers = 2;
  cfg.conv_base_filters = 2;
  cfg.latent_dim = 7;
  cfg.lstm_hidden = 5;
  const auto params = bmx::neural::init_params(cfg, 77);
  const fs::path p = dir / "model.bmxc";
  bmx::io::write_checkpoint(params, p);
  const auto back = bmx::io::read_checkpoint(p);

  std::vector<const bmx::neural::Matrix*> ma, mb;
  bmx::neural::visit_params(params, [&](const std::string&,
                                        const bmx::neural::Matrix& m) {
    ma.push_back(&m);
  });
  bmx::neural::visit_params(back, [&](const std::string&,
                                      const bmx::neural::Matrix& m) {
    mb.push_back(&m);
  });
  REQUIRE(ma.size() == mb.size());
  for (std::size_t i = 0; i < ma.size(); ++i) CHECK(*ma[i] == *mb[i]);
  CHECK(back.cfg.latent_dim == 7);
}

TEST_CASE("config JSON") {
  SECTION("chirp config round trip") {
    bmx::ChirpConfig c = bmx::ChirpConfig{}.validated();
    const auto j = bmx::io::chirp_config_to_json(c);
    const auto back = bmx::io::chirp_config_from_json(j);
    CHECK(back.bandwidth_hz == c.bandwidth_hz);
    CHECK(back.slope_hz_per_s == c.slope_hz_per_s);
    CHECK(back.adc_samples == c.adc_samples);
  }

  SECTION("gesture scene script") {
    const bmx::io::json j{
        {"gesture",
         {{"class", 3}, {"orientation_deg", 15.0}, {"seed", 9}}}};
    const auto script = bmx::io::gesture_script_from_json(j, 3.5);
    CHECK(script.label == 2);
    CHECK(script.time_steps() >= 2);
  }

  SECTION("explicit trajectory script") {
    const bmx::io::json j{
        {"label", 2},
        {"trajectory",
         {{{{"range_m", 1.5}, {"azimuth_deg", 5.0}, {"velocity_mps", 0.1}}},
          {{{"range_m", 1.52}, {"azimuth_deg", 5.0}, {"velocity_mps", -0.1}}}}}};
    const auto script = bmx::io::gesture_script_from_json(j, 3.5);
    CHECK(script.label == 1);
    REQUIRE(script.time_steps() == 2);
    CHECK(script.trajectory[0][0].range_m == 1.5);
    CHECK(script.trajectory[1][0].radial_velocity_mps == -0.1);
  }

  SECTION("bad gesture class is rejected") {
    const bmx::io::json j{{"gesture", {{"class", 9}}}};
    CHECK_THROWS_AS(bmx::io::gesture_script_from_json(j, 3.5), bmx::Error);
  }
}
