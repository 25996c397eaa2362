#pragma once

#include "disloc/burgers.hpp"
#include "disloc/congruence.hpp"
#include "disloc/core.hpp"
#include "disloc/density.hpp"
#include "disloc/expr.hpp"
#include "disloc/field.hpp"
#include "disloc/flow.hpp"
#include "disloc/frame.hpp"
#include "disloc/geometry.hpp"
#include "disloc/glide.hpp"
#include "disloc/kinematics.hpp"
#include "disloc/quadrature.hpp"
#include "disloc/verify.hpp"
