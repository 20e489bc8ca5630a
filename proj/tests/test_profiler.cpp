#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "scdnn/profiler.hpp"

using namespace scdnn;

TEST_CASE("apc error at n=16 m=1024 lands in the published band") {
    auto p = measure_absolute_error(NeuronKind::Apc, 16, 1024, 1000, 7);
    CHECK(p.absolute_error >= 0.10);
    CHECK(p.absolute_error <= 0.20);
    CHECK(std::abs(p.mean_error) <= 4.0 * p.absolute_error / std::sqrt(1000.0));
}

TEST_CASE("mux error at n=32 m=1024 lands in the published band") {
    auto p = measure_absolute_error(NeuronKind::Mux, 32, 1024, 1000, 7);
    CHECK(p.absolute_error >= 0.45);
    CHECK(p.absolute_error <= 0.67);
    CHECK(std::abs(p.mean_error) <= 4.0 * p.absolute_error / std::sqrt(1000.0));
}

TEST_CASE("long streams beat short streams") {
    for (auto impl : {NeuronKind::Apc, NeuronKind::Mux}) {
        auto longer = measure_absolute_error(impl, 4, 65536, 100, 3);
        auto shorter = measure_absolute_error(impl, 4, 128, 100, 3);
        CHECK(longer.absolute_error < shorter.absolute_error);
    }
}

TEST_CASE("zero trials is an argument error") {
    CHECK_THROWS_AS(measure_absolute_error(NeuronKind::Apc, 4, 64, 0, 1), std::invalid_argument);
}

TEST_CASE("sweep emits rows in fan-in-major order with the Table-1 trends") {
    TrialPlan plan;
    plan.impl = NeuronKind::Apc;
    plan.fan_ins = {16, 32, 64};
    plan.stream_lengths = {1024};
    plan.trials = 1000;
    plan.seed = 7;
    auto rows = sweep(plan);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].fan_in == 16);
    CHECK(rows[2].fan_in == 64);
    CHECK(rows[0].absolute_error <= rows[1].absolute_error);
    CHECK(rows[1].absolute_error <= rows[2].absolute_error);
}

TEST_CASE("error shrinks as the stream doubles") {
    for (auto impl : {NeuronKind::Apc, NeuronKind::Mux}) {
        TrialPlan plan;
        plan.impl = impl;
        plan.fan_ins = {16};
        plan.stream_lengths = {128, 256, 512, 1024};
        plan.trials = 400;
        plan.seed = 11;
        auto rows = sweep(plan);
        REQUIRE(rows.size() == 4);
        for (std::size_t i = 1; i < rows.size(); ++i)
            CHECK(rows[i].absolute_error <= rows[i - 1].absolute_error + 0.02);
    }
}

TEST_CASE("sweep input validation") {
    TrialPlan plan;
    plan.stream_lengths = {64};
    plan.trials = 100;
    CHECK_THROWS_AS(sweep(plan), std::invalid_argument);  // empty fan_ins
    plan.fan_ins = {4};
    plan.trials = 10;
    CHECK_THROWS_AS(sweep(plan), std::invalid_argument);  // below the 30-trial floor
}

TEST_CASE("identical plans reproduce bit-for-bit, across thread counts") {
    auto a = measure_absolute_error(NeuronKind::Mux, 8, 256, 200, 99, 1);
    auto b = measure_absolute_error(NeuronKind::Mux, 8, 256, 200, 99, 2);
    auto c = measure_absolute_error(NeuronKind::Mux, 8, 256, 200, 99, 0);
    CHECK(a.absolute_error == b.absolute_error);
    CHECK(a.mean_error == b.mean_error);
    CHECK(a.absolute_error == c.absolute_error);
}

TEST_CASE("mux error at n=64 towers over apc error") {
    auto apc = measure_absolute_error(NeuronKind::Apc, 64, 1024, 500, 7);
    auto mux = measure_absolute_error(NeuronKind::Mux, 64, 1024, 500, 7);
    CHECK(mux.absolute_error > 3.0 * apc.absolute_error);
}

TEST_CASE("doubling trials moves the estimate by less than 20%") {
    auto a = measure_absolute_error(NeuronKind::Apc, 16, 512, 500, 21);
    auto b = measure_absolute_error(NeuronKind::Apc, 16, 512, 1000, 21);
    CHECK(std::abs(a.absolute_error - b.absolute_error) / b.absolute_error <= 0.20);
}

TEST_CASE("calibration prefers S=2 for a single input") {
    const unsigned cands[] = {2, 4, 8};
    const double grid[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
    CHECK(calibrate_btanh_states(1, 8192, cands, grid, 30, 5) == 2);
}

TEST_CASE("exact ties break toward the smaller state count") {
    // n = 1 with z = +-1 makes the product stream constant, so every
    // candidate sees the same all-ones/all-zeros counter ride and the
    // deviation |1 - tanh(1)| exactly.
    const unsigned cands[] = {8, 4, 16};
    const double grid[] = {-1.0, 1.0};
    auto devs = btanh_calibration_deviations(1, 1024, cands, grid, 20, 5);
    CHECK(devs[0] == devs[1]);
    CHECK(devs[1] == devs[2]);
    CHECK(devs[0] == doctest::Approx(1.0 - std::tanh(1.0)));
    CHECK(calibrate_btanh_states(1, 1024, cands, grid, 20, 5) == 4);
}

TEST_CASE("calibration at n=16 confirms the 2n default") {
    const unsigned cands[] = {8, 16, 32, 64};
    const double grid[] = {-2.0, -1.0, 0.0, 1.0, 2.0};
    const unsigned chosen = calibrate_btanh_states(16, 8192, cands, grid, 30, 11);
    CHECK(chosen == 32);
    CHECK(default_btanh_states(16) == 32);
}

TEST_CASE("zero-only grid keeps every candidate near zero deviation") {
    const unsigned cands[] = {8, 16, 32};
    const double grid[] = {0.0};
    auto devs = btanh_calibration_deviations(8, 4096, cands, grid, 50, 13);
    double best = devs[0];
    for (double d : devs) {
        CHECK(d <= 0.05);
        best = std::min(best, d);
    }
    const unsigned chosen = calibrate_btanh_states(8, 4096, cands, grid, 50, 13);
    for (std::size_t i = 0; i < 3; ++i)
        if (cands[i] == chosen) CHECK(devs[i] == best);
}

TEST_CASE("calibration argument errors") {
    const double grid[] = {0.0};
    CHECK_THROWS_AS(calibrate_btanh_states(4, 64, {}, grid, 10, 1), std::invalid_argument);
    const unsigned odd[] = {3};
    CHECK_THROWS_AS(calibrate_btanh_states(4, 64, odd, grid, 10, 1), std::invalid_argument);
    const unsigned ok[] = {4};
    const double far[] = {9.0};
    CHECK_THROWS_AS(calibrate_btanh_states(4, 64, ok, far, 10, 1), std::invalid_argument);
}

TEST_CASE("csv export shape") {
    std::vector<ErrorProfile> one{{NeuronKind::Apc, 16, 1024, 100, 0.15, 0.001}};
    auto csv = profiles_to_csv(one);
    CHECK(csv == "impl,n,m,trials,abs_error,mean_error\nAPC,16,1024,100,0.15,0.001\n");

    CHECK(profiles_to_csv({}) == "impl,n,m,trials,abs_error,mean_error\n");

    TrialPlan plan;
    plan.impl = NeuronKind::Mux;
    plan.fan_ins = {2, 3, 4};
    plan.stream_lengths = {32, 64, 128, 256};
    plan.trials = 30;
    plan.seed = 1;
    auto rows = sweep(plan);
    auto text = profiles_to_csv(rows);
    std::size_t lines = 0;
    for (char c : text) lines += c == '\n';
    CHECK(lines == 13);

    const auto path = std::filesystem::temp_directory_path() / "scdnn_profile_test.csv";
    export_profiles(rows, path);
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str() == text);
    std::filesystem::remove(path);
}
