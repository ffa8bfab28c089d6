pub mod exactla;
pub mod superalg;
pub mod liealg;
pub mod fingroupoid;
pub mod laq;
pub mod builders;
pub mod dcx;
pub mod oracle;
pub mod selftest;
pub mod model;
pub mod report;
pub mod cli;
