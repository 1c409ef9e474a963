#pragma once

#include "corrgeo/corr_factor.hpp"
#include "corrgeo/errors.hpp"
#include "corrgeo/fixed_rank_quotient.hpp"
#include "corrgeo/frechet_mean.hpp"
#include "corrgeo/matrix_io.hpp"
#include "corrgeo/matrix_kernels.hpp"
#include "corrgeo/oracle.hpp"
#include "corrgeo/orthogonal_group.hpp"
#include "corrgeo/pipeline.hpp"
#include "corrgeo/product_sphere.hpp"
#include "corrgeo/quotient_space.hpp"
#include "corrgeo/sphere.hpp"
#include "corrgeo/types.hpp"
