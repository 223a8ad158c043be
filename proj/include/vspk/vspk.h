/* C interface to the vspk library. All objects are opaque handles released
 * with the matching *_free function. Every call returns a vspk_status; on
 * failure vspk_last_error() describes the problem (thread-local, valid until
 * the next failing call on the same thread). */
#ifndef VSPK_H
#define VSPK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(VSPK_BUILDING_LIBRARY)
#    define VSPK_API __declspec(dllexport)
#  else
#    define VSPK_API __declspec(dllimport)
#  endif
#else
#  define VSPK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vspk_status {
    VSPK_OK = 0,
    VSPK_INPUT_ERROR = 1,
    VSPK_COMPUTE_ERROR = 2,
    VSPK_INTERNAL_ERROR = 3
} vspk_status;

typedef struct vspk_cloud vspk_cloud;
typedef struct vspk_diagram vspk_diagram;
typedef struct vspk_kernel vspk_kernel;
typedef struct vspk_svm vspk_svm;

typedef enum vspk_scaling { VSPK_SCALING_NONE = 0, VSPK_SCALING_AUGMENT = 1, VSPK_SCALING_COMPRESS = 2 } vspk_scaling;
typedef enum vspk_centre { VSPK_CENTRE_MASS = 0, VSPK_CENTRE_PERSISTENCE = 1 } vspk_centre;

VSPK_API const char* vspk_last_error(void);
VSPK_API const char* vspk_version(void);

/* Point clouds: n points of dimension dim, row-major. */
VSPK_API vspk_status vspk_cloud_create(const double* coords, size_t n, size_t dim, vspk_cloud** out);
VSPK_API vspk_status vspk_cloud_orbit(double x0, double y0, double r, size_t n_points, vspk_cloud** out);
VSPK_API vspk_status vspk_cloud_read_csv(const char* path, vspk_cloud** out);
VSPK_API size_t vspk_cloud_size(const vspk_cloud* c);
VSPK_API size_t vspk_cloud_dim(const vspk_cloud* c);
/* Copies size*dim coordinates into `coords`. */
VSPK_API vspk_status vspk_cloud_coordinates(const vspk_cloud* c, double* coords);
VSPK_API void vspk_cloud_free(vspk_cloud* c);

VSPK_API vspk_status vspk_hausdorff(const vspk_cloud* a, const vspk_cloud* b, double* out);

/* Rips persistence of a cloud; dimension-r diagram with essential pairs
 * dropped. threshold < 0 selects the enclosing radius. */
VSPK_API vspk_status vspk_cloud_diagram(const vspk_cloud* c, int r, double threshold, vspk_diagram** out);

/* Diagrams: n (birth, death) pairs, interleaved. */
VSPK_API vspk_status vspk_diagram_create(int dim, const double* pairs, size_t n, vspk_diagram** out);
VSPK_API vspk_status vspk_diagram_read_csv(const char* path, int dim, vspk_diagram** out);
VSPK_API vspk_status vspk_diagram_write_csv(const vspk_diagram* d, const char* path);
VSPK_API size_t vspk_diagram_size(const vspk_diagram* d);
VSPK_API int vspk_diagram_dim(const vspk_diagram* d);
/* Copies 2*size values (birth, death interleaved) into `pairs`. */
VSPK_API vspk_status vspk_diagram_pairs(const vspk_diagram* d, double* pairs);
VSPK_API void vspk_diagram_free(vspk_diagram* d);

VSPK_API vspk_status vspk_bottleneck(const vspk_diagram* a, const vspk_diagram* b, double* out);
VSPK_API vspk_status vspk_wasserstein(const vspk_diagram* a, const vspk_diagram* b, double p, double* out);
VSPK_API vspk_status vspk_sliced_wasserstein(const vspk_diagram* a, const vspk_diagram* b, int n_slices, double* out);

/* Applies a scaling map (rho is used by COMPRESS only). */
VSPK_API vspk_status vspk_diagram_scale(const vspk_diagram* d, vspk_scaling s, int rho, vspk_centre centre,
                                        vspk_diagram** out);

/* Kernels. */
VSPK_API vspk_status vspk_kernel_pss(double sigma, vspk_kernel** out);
VSPK_API vspk_status vspk_kernel_pwg(double gaussian_bandwidth, double c, int delta, double tau, vspk_kernel** out);
VSPK_API vspk_status vspk_kernel_sw(double sigma, int n_slices, vspk_kernel** out);
/* New kernel: `base` precomposed with a scaling map. */
VSPK_API vspk_status vspk_kernel_with_scaling(const vspk_kernel* base, vspk_scaling s, int rho, vspk_centre centre,
                                              vspk_kernel** out);
VSPK_API vspk_status vspk_kernel_eval(const vspk_kernel* k, const vspk_diagram* a, const vspk_diagram* b,
                                      double* out);
/* n x n row-major Gram matrix into `out`. jobs = 0 uses every core. */
VSPK_API vspk_status vspk_kernel_gram(const vspk_kernel* k, const vspk_diagram* const* diagrams, size_t n,
                                      unsigned jobs, double* out);
VSPK_API void vspk_kernel_free(vspk_kernel* k);

/* One-vs-rest SVM on a precomputed n x n Gram matrix with integer labels. */
VSPK_API vspk_status vspk_svm_train(const double* gram, size_t n, const int* labels, double box, vspk_svm** out);
/* m rows of kernel values against the n training samples. */
VSPK_API vspk_status vspk_svm_predict(const vspk_svm* model, const double* k_rows, size_t m, int* out);
VSPK_API void vspk_svm_free(vspk_svm* model);

VSPK_API vspk_status vspk_scores(const int* y_true, const int* y_pred, size_t n, double* accuracy, double* f1);

/* Runs a CLI subcommand with a JSON config. On success *result_json holds a
 * JSON summary to be released with vspk_string_free. */
VSPK_API vspk_status vspk_run_command(const char* command, const char* config_json, char** result_json);
VSPK_API void vspk_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
