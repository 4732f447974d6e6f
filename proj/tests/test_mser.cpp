#include <doctest.h>

#include <algorithm>

#include "mplan/mser.hpp"
#include "support.hpp"

using namespace mplan;
using mplan::testing::ReferenceMser;

namespace {

GrayImage block_image() {
  GrayImage img(64, 64, 1.0, 200);
  for (int y = 20; y < 30; ++y)
    for (int x = 12; x < 22; ++x) img.set({x, y}, 20);
  return img;
}

CellSet rect_cells(int x0, int y0, int w, int h) {
  CellSet out;
  for (int y = y0; y < y0 + h; ++y)
    for (int x = x0; x < x0 + w; ++x) out.push_back({x, y});
  return out;
}

ExtremalRegion region_of(CellSet cells, Polarity polarity = Polarity::Dark) {
  ExtremalRegion r;
  r.cells = std::move(cells);
  r.polarity = polarity;
  r.bbox = {r.cells.front().x, r.cells.front().y, r.cells.front().x, r.cells.front().y};
  for (const Cell c : r.cells) {
    r.bbox.x_min = std::min(r.bbox.x_min, c.x);
    r.bbox.y_min = std::min(r.bbox.y_min, c.y);
    r.bbox.x_max = std::max(r.bbox.x_max, c.x);
    r.bbox.y_max = std::max(r.bbox.y_max, c.y);
  }
  return r;
}

std::vector<ExtremalRegion> of_polarity(const std::vector<ExtremalRegion>& all, Polarity p) {
  std::vector<ExtremalRegion> out;
  for (const auto& r : all)
    if (r.polarity == p) out.push_back(r);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.cells < b.cells; });
  return out;
}

}  // namespace

TEST_CASE("uniform image has no regions") {
  const GrayImage img(32, 32, 1.0, 77);
  CHECK(detect(img, MserParams::defaults_for(img)).empty());
}

TEST_CASE("a single dark block is the only region") {
  const GrayImage img = block_image();
  const auto regions = detect(img, MserParams::defaults_for(img));
  REQUIRE(regions.size() == 1);
  CHECK(regions[0].polarity == Polarity::Dark);
  CHECK(regions[0].cells == rect_cells(12, 20, 10, 10));
  CHECK(regions[0].level == 20);
  CHECK(regions[0].stability == 0.0);
  CHECK(regions[0].bbox == BoundingBox{12, 20, 21, 29});
}

TEST_CASE("a bright block reports its level in original intensities") {
  GrayImage img(40, 40, 1.0, 60);
  for (const Cell c : rect_cells(5, 5, 6, 4)) img.set(c, 180);
  auto params = MserParams::defaults_for(img);
  params.polarity = PolaritySelection::Bright;
  const auto regions = detect(img, params);
  REQUIRE(regions.size() == 1);
  CHECK(regions[0].polarity == Polarity::Bright);
  CHECK(regions[0].level == 180);
  CHECK(regions[0].cells == rect_cells(5, 5, 6, 4));

  params.polarity = PolaritySelection::Dark;
  CHECK(detect(img, params).empty());
}

TEST_CASE("strictly increasing remaps leave the block region unchanged") {
  const GrayImage img = block_image();
  std::vector<std::uint8_t> px(img.pixels().begin(), img.pixels().end());
  for (auto& v : px) v = v == 20 ? 90 : 250;
  const GrayImage remapped(64, 64, 1.0, px);
  const auto a = detect(img, MserParams::defaults_for(img));
  const auto b = detect(remapped, MserParams::defaults_for(remapped));
  REQUIRE(a.size() == b.size());
  CHECK(a[0].cells == b[0].cells);
}

TEST_CASE("area bounds filter regions") {
  const GrayImage img = block_image();
  auto params = MserParams::defaults_for(img);
  params.min_area_cells = 101;
  CHECK(detect(img, params).empty());
  params.min_area_cells = 1;
  params.max_area_cells = 99;
  CHECK(detect(img, params).empty());
}

TEST_CASE("nested near-duplicates collapse to the most stable") {
  // An 11x11 block of level 30 around a 10x10 core of level 10: the two
  // regions overlap by 100/121 < 0.9 and both survive. At 0.8 they tie on
  // stability and the lower level, the core, is kept.
  GrayImage img(48, 48, 1.0, 200);
  for (const Cell c : rect_cells(10, 10, 11, 11)) img.set(c, 30);
  for (const Cell c : rect_cells(10, 10, 10, 10)) img.set(c, 10);
  auto params = MserParams::defaults_for(img);
  params.polarity = PolaritySelection::Dark;
  CHECK(detect(img, params).size() == 2);
  params.duplicate_overlap = 0.8;
  const auto merged = detect(img, params);
  REQUIRE(merged.size() == 1);
  CHECK(merged[0].cells == rect_cells(10, 10, 10, 10));
}

TEST_CASE("detector matches the flood-fill reference on random images") {
  Rng rng(2024);
  int compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const GridSize size{rng.uniform_int(3, 12), rng.uniform_int(3, 12)};
    const GrayImage img = mplan::testing::random_image(rng, size, 0, rng.uniform_int(4, 40));
    MserParams params;
    params.delta = rng.uniform_int(1, 4);
    params.min_area_cells = 1;
    params.max_area_cells = static_cast<int>(size.cell_count());
    params.max_variation = rng.uniform(0.5, 3.0);
    params.duplicate_overlap = rng.uniform(0.5, 1.0);
    const auto regions = detect(img, params);

    for (const Polarity pol : {Polarity::Dark, Polarity::Bright}) {
      ReferenceMser ref(img, pol == Polarity::Bright);
      const auto expected = ref.detect(params.delta, params.min_area_cells, params.max_area_cells,
                                       params.max_variation, params.duplicate_overlap);
      const auto got = of_polarity(regions, pol);
      REQUIRE(got.size() == expected.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].cells == expected[i].cells);
        CHECK(got[i].stability == expected[i].stability);
        CHECK(got[i].level == (pol == Polarity::Dark ? expected[i].level : 255 - expected[i].level));
        ++compared;
      }
    }
  }
  CHECK(compared > 100);
}

TEST_CASE("regions are connected extremal sets") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const GrayImage img = mplan::testing::random_image(rng, {24, 24}, 0, 30);
    MserParams params = MserParams::defaults_for(img);
    params.max_variation = 1.0;
    for (const auto& r : detect(img, params)) {
      // Every cell passes the threshold; every in-threshold neighbor is inside.
      for (const Cell c : r.cells) {
        const int v = img.at(c);
        CHECK((r.polarity == Polarity::Dark ? v <= r.level : v >= r.level));
        const Cell nbrs[4] = {{c.x - 1, c.y}, {c.x + 1, c.y}, {c.x, c.y - 1}, {c.x, c.y + 1}};
        for (const Cell n : nbrs) {
          if (!img.size().contains(n)) continue;
          const int w = img.at(n);
          if (r.polarity == Polarity::Dark ? w <= r.level : w >= r.level) CHECK(contains(r.cells, n));
        }
      }
    }
  }
}

TEST_CASE("invalid detector parameters are rejected") {
  const GrayImage img(4, 4, 1.0, 0);
  MserParams p = MserParams::defaults_for(img);
  p.delta = 0;
  CHECK_THROWS_AS(detect(img, p), InvalidArgument);
  p = MserParams::defaults_for(img);
  p.min_area_cells = 5;
  p.max_area_cells = 4;
  CHECK_THROWS_AS(detect(img, p), InvalidArgument);
  p = MserParams::defaults_for(img);
  p.max_variation = 0.0;
  CHECK_THROWS_AS(detect(img, p), InvalidArgument);
  p = MserParams::defaults_for(img);
  p.duplicate_overlap = 1.5;
  CHECK_THROWS_AS(detect(img, p), InvalidArgument);
}

TEST_CASE("default area bounds follow the image scale") {
  const GrayImage fine(100, 100, 0.5, 0);
  const auto p = MserParams::defaults_for(fine);
  CHECK(p.min_area_cells == 8);  // a 2 m feature spans 4 cells; half its square
  CHECK(p.max_area_cells == 2500);
  const GrayImage coarse(10, 10, 10.0, 0);
  CHECK(MserParams::defaults_for(coarse).min_area_cells == 1);
}

TEST_CASE("classify picks the single region as the pit") {
  const std::vector<ExtremalRegion> regions{region_of(rect_cells(5, 5, 10, 10))};
  ClassifyParams params;
  params.terrain_cutoff_m = 500.0;
  const auto labels = classify(regions, 1.0, params, {30, 30});
  CHECK(labels.pit_region == 0);
  CHECK(labels.pit_cells == rect_cells(5, 5, 10, 10));
  CHECK(labels.obstacle_cells.empty());
  CHECK(labels.rim_cells.size() == 44);
}

TEST_CASE("classify applies the width floor and terrain cutoff") {
  const double mpc = 0.5;
  const std::vector<ExtremalRegion> regions{
      region_of(rect_cells(1, 1, 2, 1)),       // 1 m wide
      region_of(rect_cells(10, 1, 6, 6)),      // 3 m wide
      region_of(rect_cells(0, 20, 1200, 10)),  // 600 m wide
  };
  ClassifyParams params;
  params.terrain_cutoff_m = 500.0;
  const GridSize dims{1200, 40};

  const auto largest = classify(regions, mpc, params, dims);
  CHECK(largest.pit_region == 2);
  CHECK(largest.small_region_ids == std::vector<std::size_t>{0});
  CHECK(largest.obstacle_region_ids == std::vector<std::size_t>{1});
  CHECK(largest.terrain_region_ids.empty());
  CHECK(largest.obstacle_cells == rect_cells(10, 1, 6, 6));

  params.pit_rule = PitRule::seed_at({12, 3});
  const auto seeded = classify(regions, mpc, params, dims);
  CHECK(seeded.pit_region == 1);
  CHECK(seeded.terrain_region_ids == std::vector<std::size_t>{2});
  CHECK(seeded.obstacle_region_ids.empty());
  CHECK(seeded.small_region_ids == std::vector<std::size_t>{0});
}

TEST_CASE("seed rule prefers the smallest containing region") {
  const std::vector<ExtremalRegion> regions{region_of(rect_cells(0, 0, 20, 20)), region_of(rect_cells(5, 5, 4, 4))};
  ClassifyParams params;
  params.pit_rule = PitRule::seed_at({6, 6});
  CHECK(classify(regions, 1.0, params, {30, 30}).pit_region == 1);
}

TEST_CASE("rim excludes obstacle cells and the pit") {
  const std::vector<ExtremalRegion> regions{region_of(rect_cells(5, 5, 10, 10)), region_of(rect_cells(15, 5, 3, 3))};
  const auto labels = classify(regions, 1.0, {}, {30, 30});
  for (const Cell c : labels.rim_cells) {
    CHECK_FALSE(contains(labels.obstacle_cells, c));
    CHECK_FALSE(contains(labels.pit_cells, c));
  }
  CHECK(labels.rim_cells.size() == 44 - 3);
}

TEST_CASE("classify errors") {
  CHECK_THROWS_AS(classify({}, 1.0, {}, {10, 10}), ClassifyError);
  const std::vector<ExtremalRegion> regions{region_of(rect_cells(0, 0, 2, 2))};
  ClassifyParams params;
  params.pit_rule = PitRule::seed_at({8, 8});
  CHECK_THROWS_AS(classify(regions, 1.0, params, {10, 10}), ClassifyError);
}

TEST_CASE("extract_rim") {
  CHECK(extract_rim({{5, 5}}, {10, 10}) ==
        CellSet{{4, 4}, {5, 4}, {6, 4}, {4, 5}, {6, 5}, {4, 6}, {5, 6}, {6, 6}});
  const auto ring = extract_rim(rect_cells(3, 3, 2, 2), {10, 10});
  CHECK(ring.size() == 12);
  for (const Cell c : rect_cells(2, 2, 4, 4))
    CHECK(contains(ring, c) == !(c.x >= 3 && c.x <= 4 && c.y >= 3 && c.y <= 4));
  CHECK(extract_rim({{0, 0}}, {10, 10}) == CellSet{{1, 0}, {0, 1}, {1, 1}});
  CHECK_THROWS_AS(extract_rim({}, {10, 10}), InvalidArgument);
  CHECK_THROWS_AS(extract_rim({{10, 0}}, {10, 10}), InvalidArgument);
}
