#pragma once

#include "holotomo/core.hpp"
#include "holotomo/dft.hpp"
#include "holotomo/errors.hpp"
#include "holotomo/field.hpp"
#include "holotomo/grid.hpp"
#include "holotomo/mgd.hpp"
#include "holotomo/parallel.hpp"
#include "holotomo/phantom.hpp"
#include "holotomo/processing.hpp"
#include "holotomo/propagation.hpp"
#include "holotomo/tv.hpp"
#include "holotomo/unwrap.hpp"
