#ifndef TOMSIM_GEOMETRY_HPP
#define TOMSIM_GEOMETRY_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace tomsim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec3& a, const Vec3& b) {
        return a.x == b.x && a.y == b.y && a.z == b.z;
    }
    friend bool operator!=(const Vec3& a, const Vec3& b) { return !(a == b); }
};

inline double distance3(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline double planar_distance(const Vec3& a, const Vec3& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// Wraps an angle into [-pi, pi). Angles already in range pass through
// bit-unchanged, which motion code relies on.
double normalize_angle(double radians);

// A planar pose. z rides along for object heights and range computations but
// heading and visibility are strictly 2D.
struct Pose {
    Vec3 position;
    double heading = 0.0;  // radians, [-pi, pi)
};

Pose make_pose(double x, double y, double z, double heading);

// Field-of-view cone. half_angle in (0, 2*pi] radians; any value of pi or
// more sees all around, which lets text configs spell a full circle as a
// plain decimal like 3.2. max_range in meters (> 0).
struct FovParams {
    double half_angle = 1.0471975511965976;  // pi/3
    double max_range = 8.0;
};

// Throws ValidationError when the parameters are out of range.
void validate_fov(const FovParams& fov);

struct GridCell {
    int x = 0;
    int y = 0;

    friend bool operator==(GridCell a, GridCell b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(GridCell a, GridCell b) { return !(a == b); }
};

// Walls-only occupancy grid over a uniform square-cell discretization of the
// plane. origin is the world position of the outer corner of cell (0,0); cell
// (0,0) spans [origin.x, origin.x + cell_size) x [origin.y, origin.y + cell_size).
class GridMap {
public:
    GridMap(int width, int height, double cell_size, Vec2 origin);

    // rows use '#' for wall and '.' for free; the first row is the highest-y
    // row, matching how a map reads on screen.
    static GridMap from_ascii(const std::vector<std::string>& rows, double cell_size,
                              Vec2 origin);
    std::vector<std::string> to_ascii() const;

    int width() const { return width_; }
    int height() const { return height_; }
    double cell_size() const { return cell_size_; }
    Vec2 origin() const { return origin_; }

    bool in_bounds(GridCell c) const {
        return c.x >= 0 && c.x < width_ && c.y >= 0 && c.y < height_;
    }
    bool is_wall(GridCell c) const;
    void set_wall(GridCell c, bool wall);

    std::size_t row_major_index(GridCell c) const {
        return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(c.x);
    }

    // Boundary points belong to the cell on their +x/+y side, except points on
    // the maximal edge, which belong to the last cell. Throws OutOfBoundsError.
    GridCell world_to_cell(double wx, double wy) const;
    GridCell world_to_cell(const Vec3& p) const { return world_to_cell(p.x, p.y); }

    Vec2 cell_center(GridCell c) const;

    std::vector<GridCell> free_cells_row_major() const;

    friend bool operator==(const GridMap& a, const GridMap& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ &&
               a.cell_size_ == b.cell_size_ && a.origin_.x == b.origin_.x &&
               a.origin_.y == b.origin_.y && a.walls_ == b.walls_;
    }

private:
    int width_;
    int height_;
    double cell_size_;
    Vec2 origin_;
    std::vector<std::uint8_t> walls_;
};

// 8-connected Bresenham line between two in-bounds cells, endpoints included.
// The visit set is symmetric under endpoint swap: the line is always rasterized
// from the endpoint with the smaller (y, x) key and reversed as needed, so
// exact half-cell ties resolve the same way in both directions.
std::vector<GridCell> trace_line(const GridMap& grid, GridCell a, GridCell b);

// True iff no wall cell lies strictly between the cells containing the two
// world points along trace_line. Endpoint cells never block, so standing on a
// counter does not hide the counter. Purely planar; z is ignored.
bool line_of_sight(const GridMap& grid, const Vec3& from, const Vec3& to);

// True iff the target lies within max_range planar distance and within
// half_angle of the observer's heading. A target coincident with the observer
// is always in view.
bool in_fov(const Pose& observer, const FovParams& fov, const Vec3& target);

// An 8-connected grid route. cost is in cell units: 1 per straight step,
// sqrt(2) per diagonal step.
struct GridPath {
    std::vector<GridCell> cells;
    double cost = 0.0;
};

// Deterministic A* with the octile-distance heuristic. Ties in the open list
// break on (f, h, row-major index). Throws InvalidCellError when start or goal
// is a wall or out of bounds, NoPathError when the goal is unreachable.
GridPath astar(const GridMap& grid, GridCell start, GridCell goal);

}  // namespace tomsim

#endif
