#pragma once

#include "funkradon/core.hpp"
#include "funkradon/field.hpp"
#include "funkradon/format.hpp"
#include "funkradon/geometry.hpp"
#include "funkradon/inversion.hpp"
#include "funkradon/kernel.hpp"
#include "funkradon/parallel.hpp"
#include "funkradon/phantom.hpp"
#include "funkradon/quadrature.hpp"
#include "funkradon/sinogram.hpp"
#include "funkradon/transform.hpp"
#include "funkradon/trigpoly.hpp"
