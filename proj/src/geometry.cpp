#include "tomsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <queue>

#include "tomsim/errors.hpp"

namespace tomsim {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;
}  // namespace

double normalize_angle(double radians) {
    double a = radians;
    if (a >= kPi || a < -kPi) {
        a = std::fmod(a + kPi, 2.0 * kPi);
        if (a < 0.0) a += 2.0 * kPi;
        a -= kPi;
    }
    return a;
}

Pose make_pose(double x, double y, double z, double heading) {
    return Pose{Vec3{x, y, z}, normalize_angle(heading)};
}

void validate_fov(const FovParams& fov) {
    if (!(fov.half_angle > 0.0) || !(fov.half_angle <= 2.0 * kPi))
        throw ValidationError("fov half_angle must be in (0, 2*pi]");
    if (!(fov.max_range > 0.0)) throw ValidationError("fov max_range must be positive");
}

GridMap::GridMap(int width, int height, double cell_size, Vec2 origin)
    : width_(width), height_(height), cell_size_(cell_size), origin_(origin) {
    if (width <= 0 || height <= 0) throw ValidationError("grid dimensions must be positive");
    if (!(cell_size > 0.0)) throw ValidationError("cell_size must be positive");
    walls_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

GridMap GridMap::from_ascii(const std::vector<std::string>& rows, double cell_size,
                            Vec2 origin) {
    if (rows.empty()) throw ValidationError("grid block is empty");
    const std::size_t width = rows.front().size();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != width)
            throw ValidationError("grid row " + std::to_string(r) + " has width " +
                                  std::to_string(rows[r].size()) + ", expected " +
                                  std::to_string(width));
        for (char c : rows[r])
            if (c != '#' && c != '.')
                throw ValidationError("grid row " + std::to_string(r) +
                                      " contains a character other than '#' or '.'");
    }
    GridMap grid(static_cast<int>(width), static_cast<int>(rows.size()), cell_size, origin);
    // First text row is the highest-y row.
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const int y = grid.height_ - 1 - static_cast<int>(r);
        for (std::size_t x = 0; x < width; ++x)
            if (rows[r][x] == '#') grid.set_wall({static_cast<int>(x), y}, true);
    }
    return grid;
}

std::vector<std::string> GridMap::to_ascii() const {
    std::vector<std::string> rows;
    rows.reserve(static_cast<std::size_t>(height_));
    for (int y = height_ - 1; y >= 0; --y) {
        std::string row(static_cast<std::size_t>(width_), '.');
        for (int x = 0; x < width_; ++x)
            if (is_wall({x, y})) row[static_cast<std::size_t>(x)] = '#';
        rows.push_back(std::move(row));
    }
    return rows;
}

bool GridMap::is_wall(GridCell c) const {
    if (!in_bounds(c))
        throw InvalidCellError("cell (" + std::to_string(c.x) + ", " + std::to_string(c.y) +
                               ") is out of bounds");
    return walls_[row_major_index(c)] != 0;
}

void GridMap::set_wall(GridCell c, bool wall) {
    if (!in_bounds(c))
        throw InvalidCellError("cell (" + std::to_string(c.x) + ", " + std::to_string(c.y) +
                               ") is out of bounds");
    walls_[row_major_index(c)] = wall ? 1 : 0;
}

GridCell GridMap::world_to_cell(double wx, double wy) const {
    const double rx = (wx - origin_.x) / cell_size_;
    const double ry = (wy - origin_.y) / cell_size_;
    if (rx < 0.0 || ry < 0.0 || rx > static_cast<double>(width_) ||
        ry > static_cast<double>(height_))
        throw OutOfBoundsError("world point (" + std::to_string(wx) + ", " +
                               std::to_string(wy) + ") lies outside the grid");
    int cx = static_cast<int>(std::floor(rx));
    int cy = static_cast<int>(std::floor(ry));
    if (cx == width_) cx = width_ - 1;    // maximal edge belongs to the last cell
    if (cy == height_) cy = height_ - 1;
    return {cx, cy};
}

Vec2 GridMap::cell_center(GridCell c) const {
    return {origin_.x + (static_cast<double>(c.x) + 0.5) * cell_size_,
            origin_.y + (static_cast<double>(c.y) + 0.5) * cell_size_};
}

std::vector<GridCell> GridMap::free_cells_row_major() const {
    std::vector<GridCell> cells;
    for (int y = 0; y < height_; ++y)
        for (int x = 0; x < width_; ++x)
            if (!is_wall({x, y})) cells.push_back({x, y});
    return cells;
}

namespace {

// Classic integer Bresenham, one cell per loop turn, stepping diagonally when
// both error thresholds trip.
std::vector<GridCell> raster_line(GridCell a, GridCell b) {
    std::vector<GridCell> out;
    int x = a.x, y = a.y;
    const int dx = std::abs(b.x - a.x);
    const int dy = -std::abs(b.y - a.y);
    const int sx = a.x < b.x ? 1 : -1;
    const int sy = a.y < b.y ? 1 : -1;
    int err = dx + dy;
    out.reserve(static_cast<std::size_t>(std::max(dx, -dy)) + 1);
    for (;;) {
        out.push_back({x, y});
        if (x == b.x && y == b.y) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y += sy;
        }
    }
    return out;
}

bool row_major_less(GridCell a, GridCell b) {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
}

}  // namespace

std::vector<GridCell> trace_line(const GridMap& grid, GridCell a, GridCell b) {
    if (!grid.in_bounds(a) || !grid.in_bounds(b))
        throw InvalidCellError("trace_line endpoints must be in bounds");
    if (row_major_less(b, a)) {
        std::vector<GridCell> cells = raster_line(b, a);
        std::reverse(cells.begin(), cells.end());
        return cells;
    }
    return raster_line(a, b);
}

bool line_of_sight(const GridMap& grid, const Vec3& from, const Vec3& to) {
    const GridCell a = grid.world_to_cell(from);
    const GridCell b = grid.world_to_cell(to);
    const std::vector<GridCell> cells = trace_line(grid, a, b);
    for (std::size_t i = 1; i + 1 < cells.size(); ++i)
        if (grid.is_wall(cells[i])) return false;
    return true;
}

bool in_fov(const Pose& observer, const FovParams& fov, const Vec3& target) {
    const double dx = target.x - observer.position.x;
    const double dy = target.y - observer.position.y;
    if (std::hypot(dx, dy) > fov.max_range) return false;
    if (dx == 0.0 && dy == 0.0) return true;
    const double off = normalize_angle(std::atan2(dy, dx) - observer.heading);
    return std::abs(off) <= fov.half_angle;
}

namespace {

double octile(GridCell a, GridCell b) {
    const int dx = std::abs(a.x - b.x);
    const int dy = std::abs(a.y - b.y);
    const int lo = std::min(dx, dy);
    const int hi = std::max(dx, dy);
    return static_cast<double>(lo) * kSqrt2 + static_cast<double>(hi - lo);
}

struct OpenEntry {
    double f;
    double h;
    std::size_t index;  // row-major cell index
};

struct OpenEntryGreater {
    bool operator()(const OpenEntry& a, const OpenEntry& b) const {
        if (a.f != b.f) return a.f > b.f;
        if (a.h != b.h) return a.h > b.h;
        return a.index > b.index;
    }
};

constexpr int kNeighborDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kNeighborDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

}  // namespace

GridPath astar(const GridMap& grid, GridCell start, GridCell goal) {
    if (!grid.in_bounds(start) || grid.is_wall(start))
        throw InvalidCellError("astar start cell is a wall or out of bounds");
    if (!grid.in_bounds(goal) || grid.is_wall(goal))
        throw InvalidCellError("astar goal cell is a wall or out of bounds");

    const std::size_t n = static_cast<std::size_t>(grid.width()) *
                          static_cast<std::size_t>(grid.height());
    // Per-cell straight/diagonal step counts; the reported cost is rebuilt from
    // them as s + d*sqrt(2) so equal-cost paths always print the same number.
    std::vector<int> straight(n, -1), diagonal(n, -1);
    std::vector<std::int32_t> parent(n, -1);
    std::vector<std::uint8_t> settled(n, 0);

    auto cost_of = [](int s, int d) {
        return static_cast<double>(s) + static_cast<double>(d) * kSqrt2;
    };
    auto index_of = [&](GridCell c) { return grid.row_major_index(c); };
    auto cell_of = [&](std::size_t idx) {
        return GridCell{static_cast<int>(idx % static_cast<std::size_t>(grid.width())),
                        static_cast<int>(idx / static_cast<std::size_t>(grid.width()))};
    };

    std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenEntryGreater> open;
    const std::size_t start_idx = index_of(start);
    const std::size_t goal_idx = index_of(goal);
    straight[start_idx] = 0;
    diagonal[start_idx] = 0;
    open.push({octile(start, goal), octile(start, goal), start_idx});

    while (!open.empty()) {
        const OpenEntry top = open.top();
        open.pop();
        if (settled[top.index]) continue;
        settled[top.index] = 1;
        if (top.index == goal_idx) break;

        const GridCell here = cell_of(top.index);
        const int s_here = straight[top.index];
        const int d_here = diagonal[top.index];
        for (int k = 0; k < 8; ++k) {
            const GridCell next{here.x + kNeighborDx[k], here.y + kNeighborDy[k]};
            if (!grid.in_bounds(next) || grid.is_wall(next)) continue;
            const std::size_t next_idx = index_of(next);
            if (settled[next_idx]) continue;
            const bool diag = kNeighborDx[k] != 0 && kNeighborDy[k] != 0;
            const int s_new = s_here + (diag ? 0 : 1);
            const int d_new = d_here + (diag ? 1 : 0);
            const double g_new = cost_of(s_new, d_new);
            if (straight[next_idx] >= 0 &&
                g_new >= cost_of(straight[next_idx], diagonal[next_idx]))
                continue;
            straight[next_idx] = s_new;
            diagonal[next_idx] = d_new;
            parent[next_idx] = static_cast<std::int32_t>(top.index);
            const double h = octile(next, goal);
            open.push({g_new + h, h, next_idx});
        }
    }

    if (!settled[goal_idx]) throw NoPathError("no route between the requested cells");

    GridPath path;
    path.cost = cost_of(straight[goal_idx], diagonal[goal_idx]);
    std::size_t idx = goal_idx;
    for (;;) {
        path.cells.push_back(cell_of(idx));
        if (idx == start_idx) break;
        idx = static_cast<std::size_t>(parent[idx]);
    }
    std::reverse(path.cells.begin(), path.cells.end());
    return path;
}

}  // namespace tomsim
