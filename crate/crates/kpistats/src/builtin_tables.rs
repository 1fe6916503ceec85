// Embedded copies of the two bundled datasets. Values mirror the fixture
// files in data/ cell for cell; a test asserts the two transcriptions agree.

pub(crate) const TABLE1_SAMPLE_COLUMN: &str = "Sample period";
pub(crate) const TABLE1_SAMPLES: [&str; 20] = ["Hr 1", "Hr 2", "Hr 3", "Hr 4", "Hr 5", "Hr 6", "Hr 7", "Hr 8", "Hr 9", "Hr 10", "Hr 11", "Hr 12", "Hr 13", "Hr 14", "Hr 15", "Hr 16", "Hr 17", "Hr 18", "Hr 19", "Hr 20"];
pub(crate) const TABLE1_VARIABLES: [&str; 5] = ["GGSN utilization", "Gn interface Packet loss", "Gi interface Packet loss", "Latency", "Gi throughput"];
pub(crate) const TABLE1_UNITS: [&str; 5] = ["%", "Packet/s", "Packet/s", "second", "Mbps"];
pub(crate) const TABLE1_VALUES: [[f64; 5]; 20] = [
    [1.0, 0.0, 0.0, 0.00204, 2.442508],
    [1.0, 0.0, 0.0, 0.00213, 3.348526],
    [3.0, 0.00028, 0.0, 0.00238, 87.9525],
    [3.0, 0.0, 0.0, 0.00243, 99.157604],
    [5.0, 0.0, 0.0, 0.00294, 216.021441],
    [6.0, 0.0, 0.00028, 0.00277, 238.313785],
    [2.0, 0.0, 0.0, 0.00208, 28.812852],
    [2.0, 0.0, 0.0, 0.00213, 48.393216],
    [3.0, 0.00333, 0.00056, 0.00217, 65.983333],
    [2.0, 0.0, 0.0, 0.00208, 29.313644],
    [2.0, 0.0, 0.0025, 0.00213, 57.543637],
    [1.0, 0.0, 0.0, 0.002, 2.781329],
    [1.0, 0.0, 0.0, 0.002, 2.660693],
    [1.0, 0.0, 0.0, 0.002, 2.667828],
    [1.0, 0.0, 0.0, 0.002, 3.030091],
    [1.0, 0.0, 0.0, 0.002, 2.578499],
    [1.0, 0.0, 0.0, 0.00204, 2.371938],
    [1.0, 0.0, 0.0, 0.00213, 2.370775],
    [1.0, 0.0, 0.0, 0.00238, 2.373311],
    [1.0, 0.0, 0.0, 0.00243, 2.369829],
];

pub(crate) const TABLE2_SAMPLE_COLUMN: &str = "Sample Period";
pub(crate) const TABLE2_SAMPLES: [&str; 20] = ["Sample 1", "Sample 2", "Sample 3", "Sample 4", "Sample 5", "Sample 6", "Sample 7", "Sample 8", "Sample 9", "Sample 10", "Sample 11", "Sample 12", "Sample 13", "Sample 14", "Sample 15", "Sample 16", "Sample 17", "Sample 18", "Sample 19", "Sample 20"];
pub(crate) const TABLE2_VARIABLES: [&str; 8] = ["Latency", "Throughput", "Packet Losses", "Web service", "Voice", "FTP", "E-mail", "Video"];
pub(crate) const TABLE2_UNITS: [&str; 8] = ["Second", "Mbps", "", "Mbps", "Mbps", "Mbps", "Mbps", "Mbps"];
pub(crate) const TABLE2_VALUES: [[f64; 8]; 20] = [
    [1.219, 26.89, 1.0, 3.376, 1.12, 5.779, 0.0, 6.17],
    [1.114, 11.15, 0.0, 1.201, 2.79, 3.543, 0.207, 2.599],
    [1.115, 11.16, 0.0, 1.101, 1.59, 2.45, 0.0, 2.413],
    [1.158, 14.65, 0.0, 1.77, 1.19, 0.0, 0.0, 2.732],
    [1.155, 14.65, 0.0, 0.792, 3.56, 2.769, 0.0, 1.91],
    [1.301, 30.69, 1.0, 4.095, 5.16, 0.0, 0.414, 5.974],
    [1.293, 30.69, 1.0, 6.01, 3.31, 5.981, 0.0, 6.316],
    [1.289, 26.84, 0.0, 5.508, 2.17, 6.774, 0.128, 5.154],
    [1.281, 26.84, 1.0, 7.965, 1.72, 5.853, 0.327, 5.78],
    [1.283, 26.52, 0.0, 4.781, 3.17, 6.12, 0.0, 3.125],
    [1.285, 26.52, 0.0, 3.79, 6.03, 7.002, 0.0, 4.538],
    [1.311, 32.93, 2.0, 5.834, 3.17, 9.176, 0.0, 7.437],
    [1.309, 32.93, 1.0, 7.86, 6.58, 8.402, 1.379, 11.508],
    [1.193, 19.24, 0.0, 1.659, 4.03, 5.198, 0.693, 5.001],
    [1.201, 19.24, 0.0, 1.878, 5.24, 4.708, 0.145, 4.609],
    [1.282, 28.75, 1.0, 4.012, 6.79, 7.934, 0.0, 8.622],
    [1.291, 28.75, 1.0, 4.665, 6.69, 0.0, 0.019, 7.48],
    [1.45, 45.62, 11.0, 5.234, 7.75, 11.356, 0.954, 23.99],
    [1.499, 45.62, 7.0, 6.651, 6.51, 16.435, 0.0, 24.105],
    [1.46, 45.63, 1.0, 5.633, 6.5, 10.994, 0.0, 19.786],
];
