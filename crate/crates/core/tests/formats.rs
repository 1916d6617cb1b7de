//! On-disk containers, checked byte for byte against hand-assembled files.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};

use hdc::assoc::{ItemMemory, MemoryMode, SensorimotorMemory};
use hdc::bloom::{OrBundleFilter, SparseItemEncoder};
use hdc::experiments::{build_sensorimotor_memory, ExperimentConfig};
use hdc::hv::{read_hdhv, write_hdhv};
use hdc::rng::seeded;
use hdc::Hypervector;

fn bits(s: &str) -> Hypervector {
    Hypervector::from_bits(&s.chars().map(|c| c == '1').collect::<Vec<_>>()).unwrap()
}

fn tiny_memory(mode: MemoryMode) -> SensorimotorMemory {
    let mut velocities = ItemMemory::new(3).unwrap();
    velocities.insert("a".to_string(), bits("101")).unwrap();
    let mut mem = SensorimotorMemory::new(mode, velocities, bits("001")).unwrap();
    mem.store(&bits("110"), "a").unwrap();
    mem
}

fn bytes_of(mem: &SensorimotorMemory) -> Vec<u8> {
    let mut buf = Vec::new();
    mem.write_to(&mut buf).unwrap();
    buf
}

#[test]
fn tabular_memory_layout() {
    let mut expected = b"HDAM".to_vec();
    expected.extend([1, 1]);
    expected.extend([3, 0, 0, 0, 1, 0, 0, 0]);
    expected.extend([1, 0, 0, 0, b'a', 0b101]);
    // one record: 110 xor 101 = 011, element 0 in the low bit
    expected.extend([1, 0, 0, 0, 0b110]);
    let mem = tiny_memory(MemoryMode::Tabular);
    assert_eq!(bytes_of(&mem), expected);
    assert_eq!(SensorimotorMemory::read_from(&mut expected.as_slice()).unwrap(), mem);
}

#[test]
fn bundled_memory_layout() {
    let mut expected = b"HDAM".to_vec();
    expected.extend([1, 0]);
    expected.extend([3, 0, 0, 0, 1, 0, 0, 0]);
    expected.extend([1, 0, 0, 0, b'a', 0b101]);
    expected.push(0b100);
    expected.extend([1, 0, 0, 0]);
    for c in [-1i32, 1, 1] {
        expected.extend(c.to_le_bytes());
    }
    let mem = tiny_memory(MemoryMode::Bundled);
    assert_eq!(bytes_of(&mem), expected);
    assert_eq!(SensorimotorMemory::read_from(&mut expected.as_slice()).unwrap(), mem);
}

#[test]
fn damaged_memories_are_rejected() {
    let good = bytes_of(&tiny_memory(MemoryMode::Bundled));
    for cut in 0..good.len() {
        assert!(SensorimotorMemory::read_from(&mut &good[..cut]).is_err(), "cut at {cut}");
    }
    let mut bad_mode = good.clone();
    bad_mode[5] = 7;
    assert!(SensorimotorMemory::read_from(&mut bad_mode.as_slice()).is_err());
    // a counter of 2 cannot come from a single stored record
    let mut bad_count = good.clone();
    let n = bad_count.len();
    bad_count[n - 4] = 2;
    assert!(SensorimotorMemory::read_from(&mut bad_count.as_slice()).is_err());
    let mut huge_label = good;
    huge_label[14..18].copy_from_slice(&u32::MAX.to_le_bytes());
    assert!(SensorimotorMemory::read_from(&mut huge_label.as_slice()).is_err());
}

#[test]
fn experiment_memories_survive_files() {
    let cfg = ExperimentConfig {
        dim: 2048,
        ..ExperimentConfig::default()
    };
    let dir = tempfile::tempdir().unwrap();
    for mode in [MemoryMode::Bundled, MemoryMode::Tabular] {
        let mem = build_sensorimotor_memory(&cfg, mode, 9).unwrap();
        let path = dir.path().join(format!("{}.hdam", mode.as_str()));
        let mut w = BufWriter::new(File::create(&path).unwrap());
        mem.write_to(&mut w).unwrap();
        w.flush().unwrap();
        drop(w);
        let back = SensorimotorMemory::read_from(&mut BufReader::new(File::open(&path).unwrap())).unwrap();
        assert_eq!(back, mem);
        assert_eq!(back.len(), 9);
    }
}

#[test]
fn vectors_and_filters_survive_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = seeded(11);
    let path = dir.path().join("v.hdhv");
    let hv = Hypervector::random(1000, &mut rng).unwrap();
    write_hdhv(&mut File::create(&path).unwrap(), &hv).unwrap();
    assert_eq!(std::fs::metadata(&path).unwrap().len(), 9 + 125);
    assert_eq!(read_hdhv(&mut File::open(&path).unwrap()).unwrap(), hv);

    let path = dir.path().join("f.hdbf");
    let mut filter = OrBundleFilter::new(SparseItemEncoder::new(4096, 5, 99).unwrap());
    for i in 0..300u32 {
        filter.insert(&i.to_be_bytes());
    }
    filter.write_to(&mut File::create(&path).unwrap()).unwrap();
    let back = OrBundleFilter::read_from(&mut File::open(&path).unwrap()).unwrap();
    assert_eq!(back, filter);
    assert!((0..300u32).all(|i| back.contains(&i.to_be_bytes())));
}
