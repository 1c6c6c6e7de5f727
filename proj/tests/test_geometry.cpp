#include "doctest.h"

#include "porehom/errors.hpp"
#include "porehom/geometry.hpp"

#include "test_support.hpp"

#include <algorithm>
#include <map>

using namespace porehom;

TEST_CASE("channel cell porosity matches cross-section") {
    SUBCASE("wavy cell, published porosity") {
        CellGeometry cell = build_channel_cell(0.27, 0.46, 128);
        CHECK(std::abs(cell.porosity() - 0.46) <= 0.01);
    }
    SUBCASE("no obstacle") {
        CellGeometry cell = build_channel_cell(0.0, 1.0, 64);
        CHECK(cell.porosity() == 1.0);
        CHECK(cell.fluid_count() == 64 * 64);
        CHECK(cell.boundary_faces().empty());
    }
    SUBCASE("straight channel is exact") {
        CellGeometry cell = build_channel_cell(0.0, 0.5, 128);
        CHECK(cell.porosity() == 0.5);
    }
}

TEST_CASE("geometry parameter validation") {
    CHECK_THROWS_AS(build_channel_cell(-0.1, 0.5, 64), GeometryError);
    CHECK_THROWS_AS(build_channel_cell(0.0, 0.0, 64), GeometryError);
    CHECK_THROWS_AS(build_channel_cell(0.6, 0.5, 64), GeometryError);
    CHECK_THROWS_AS(build_channel_cell(0.1, 0.5, 8), GeometryError);
    // all-solid and disconnected masks
    CHECK_THROWS_AS(CellGeometry(4, 4, std::vector<uint8_t>(16, 0)), GeometryError);
    {
        // two fluid pixels separated by solid in both directions
        std::vector<uint8_t> m(16, 0);
        m[0] = 1;
        m[10] = 1;
        CHECK_THROWS_AS(CellGeometry(4, 4, std::move(m)), GeometryError);
    }
}

TEST_CASE("boundary faces: straight channel walls are horizontal") {
    CellGeometry cell = build_channel_cell(0.0, 0.5, 64);
    auto faces = cell.boundary_faces();
    CHECK(!faces.empty());
    for (const auto& f : faces) {
        CHECK(f.nx == 0);
        CHECK(std::abs(f.ny) == 1);
    }
    // equal numbers of up and down normals
    int up = 0, down = 0;
    for (const auto& f : faces) (f.ny > 0 ? up : down)++;
    CHECK(up == down);
}

TEST_CASE("boundary faces: wavy channel has both normal families") {
    CellGeometry cell = build_channel_cell(0.27, 0.46, 64);
    auto faces = cell.boundary_faces();
    bool any_x = false, any_y = false;
    for (const auto& f : faces) {
        if (f.nx != 0) any_x = true;
        if (f.ny != 0) any_y = true;
    }
    CHECK(any_x);
    CHECK(any_y);
}

TEST_CASE("translating the mask leaves porosity and face multiset unchanged") {
    CellGeometry cell = build_channel_cell(0.27, 0.46, 48);
    const int n = 48, shift = 13;
    std::vector<uint8_t> shifted(static_cast<std::size_t>(n) * n, 0);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            shifted[static_cast<std::size_t>(j) * n + i] =
                cell.fluid((i + shift) % n, j) ? 1 : 0;
    CellGeometry moved(n, n, std::move(shifted));
    CHECK(moved.porosity() == cell.porosity());

    auto count_normals = [](const CellGeometry& c) {
        std::map<std::pair<int, int>, int> hist;
        for (const auto& f : c.boundary_faces()) hist[{f.nx, f.ny}]++;
        return hist;
    };
    CHECK(count_normals(moved) == count_normals(cell));
}

TEST_CASE("porosity refinement changes at most O(1/resolution)") {
    const double p64 = build_channel_cell(0.27, 0.46, 64).porosity();
    const double p128 = build_channel_cell(0.27, 0.46, 128).porosity();
    const double p256 = build_channel_cell(0.27, 0.46, 256).porosity();
    CHECK(std::abs(p128 - p64) <= 4.0 / 64);
    CHECK(std::abs(p256 - p128) <= 4.0 / 128);
}

TEST_CASE("mask text round trip is exact") {
    CellGeometry cell = build_channel_cell(0.27, 0.46, 32);
    CellGeometry back = CellGeometry::from_text(cell.to_text());
    CHECK(back.nx() == cell.nx());
    CHECK(back.ny() == cell.ny());
    CHECK(back.porosity() == cell.porosity());
    CHECK(back.mask_hash() == cell.mask_hash());
}

TEST_CASE("boundary faces empty iff porosity is one") {
    CHECK(build_empty_cell(32).boundary_faces().empty());
    for (unsigned seed : {1u, 2u, 3u}) {
        auto cell = testsup::random_blob_cell(24, seed);
        if (cell.porosity() < 1.0)
            CHECK(!cell.boundary_faces().empty());
    }
}
