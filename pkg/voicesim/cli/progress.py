def _fmt(value, unit: str) -> str:
    if value is None:
        return 'undefined'
    if isinstance(value, str):
        return value
    return f"{value:.2f}{unit}"


def progress_callback(event: str, data: dict):
    """Print progress updates to console"""
    if event == 'status':
        print(f"🔍 {data['message']}")
    elif event == 'manifest_loaded':
        print(f"✅ Cohort: {data['speakers']} speakers, {data['segments']} segments")
    elif event == 'cohort_generated':
        print(f"✅ Generated {data['speakers']} speakers, {data['segments']} segments")
    elif event == 'scores_loaded':
        print(f"📄 {data['kind']}: {data['trials']} trials ({data['targets']} target)")
    elif event == 'trials_written':
        print(f"📄 {data['kind']}: {data['trials']} trials")
    elif event == 'matrix_built':
        print(f"  ✓ M_{data['kind']} built ({data['speakers']}x{data['speakers']})")
    elif event == 'metrics':
        print("\n" + "=" * 60)
        print("📊 Summary:")
        print(f"   - DeID: {_fmt(data['deid_percent'], '%')}")
        print(f"   - G_VD: {_fmt(data['gvd_db'], ' dB')}")
        if data['flags']:
            print(f"   ⚠️  Flags: {', '.join(data['flags'])}")
        print("=" * 60)
    elif event == 'written':
        print(f"💾 Wrote {len(data['files'])} files to {data['out_dir']}")
    elif event == 'error':
        print(f"\n❌ Error: {data['message']}")
