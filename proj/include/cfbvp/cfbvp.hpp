#pragma once

#include "cfbvp/cf_calculus.hpp"
#include "cfbvp/error.hpp"
#include "cfbvp/expr.hpp"
#include "cfbvp/fixed_point.hpp"
#include "cfbvp/greens_kernel.hpp"
#include "cfbvp/grid_function.hpp"
#include "cfbvp/hypothesis.hpp"
#include "cfbvp/linear_ide.hpp"
#include "cfbvp/mesh.hpp"
#include "cfbvp/problem.hpp"
#include "cfbvp/report.hpp"
#include "cfbvp/spline.hpp"
