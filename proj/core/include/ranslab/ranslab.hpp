#pragma once

#include "ranslab/assembly.hpp"
#include "ranslab/channel.hpp"
#include "ranslab/derived.hpp"
#include "ranslab/error.hpp"
#include "ranslab/expr.hpp"
#include "ranslab/form.hpp"
#include "ranslab/formula.hpp"
#include "ranslab/function_space.hpp"
#include "ranslab/linalg.hpp"
#include "ranslab/mesh.hpp"
#include "ranslab/ns_solver.hpp"
#include "ranslab/post.hpp"
#include "ranslab/quadrature.hpp"
#include "ranslab/scheme.hpp"
#include "ranslab/turbulence.hpp"
#include "ranslab/walldist.hpp"
