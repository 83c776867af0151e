pub mod worked_example;
